import init, { catalogNames, dfCurve, angleWindows, oracleConvergence } from "./pkg/logklab_web.js";

const $ = (id) => document.getElementById(id);
const approx = (v) => parseFloat(v.approx);

function frame(canvas, xs, ys, pad = 40) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys, 0), Math.max(...ys, 0)];
  if (y0 === y1) y1 = y0 + 1;
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (canvas.width - 2 * pad);
  const sy = (y) => canvas.height - pad - ((y - y0) / (y1 - y0)) * (canvas.height - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, sy(0));
  ctx.lineTo(canvas.width - pad, sy(0));
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText(y1.toPrecision(3), 2, sy(y1) + 4);
  ctx.fillText(y0.toPrecision(3), 2, sy(y0));
  return { ctx, sx, sy };
}

function line(ctx, sx, sy, xs, ys, colour) {
  ctx.strokeStyle = colour;
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
}

function fail(out, e) {
  out.textContent = String(e);
  out.className = "err";
}

function runDf() {
  const out = $("df-out");
  try {
    const r = JSON.parse(dfCurve($("pair").value, $("df-beta").value, +$("df-steps").value));
    const cs = r.points.map((p) => approx(p.c));
    const df = r.points.map((p) => approx(p.df));
    const jna = r.points.map((p) => approx(p.jna));
    const { ctx, sx, sy } = frame($("df-plot"), cs, df.concat(jna));
    line(ctx, sx, sy, cs, jna, "#8a8");
    line(ctx, sx, sy, cs, df, "#c33");
    if (r.critical.kind === "bracket") {
      const c = approx(r.critical.lo);
      ctx.strokeStyle = "#36c";
      ctx.beginPath();
      ctx.moveTo(sx(c), 0);
      ctx.lineTo(sx(c), ctx.canvas.height);
      ctx.stroke();
    }
    const crit =
      r.critical.kind === "bracket"
        ? `DF changes sign in [${r.critical.lo.exact}, ${r.critical.hi.exact}]`
        : r.critical.kind === "every"
          ? "DF < 0 for every c"
          : r.critical.reason;
    out.className = "";
    out.textContent = `instability threshold ${r.threshold.exact}\n${crit}\nred: DF, green: J^NA`;
  } catch (e) {
    fail(out, e);
  }
}

function runWindows() {
  const out = $("w-out");
  try {
    const r = JSON.parse(angleWindows($("pair").value, +$("w-m").value, $("w-al").value, $("w-ald").value, 256));
    const cv = $("w-plot");
    const ctx = cv.getContext("2d");
    ctx.clearRect(0, 0, cv.width, cv.height);
    const sx = (b) => 40 + b * (cv.width - 80);
    r.eta_scan.forEach((s) => {
      ctx.fillStyle = s.status === "satisfied" ? "#4a4" : "#ddd";
      ctx.fillRect(sx(approx(s.beta)) - 1, 10, 3, 30);
    });
    [["uniform", 60, "#36c"], ["large_m", 85, "#c63"], ["given_m", 110, "#939"]].forEach(([key, y, colour]) => {
      const w = r[key];
      if (!w.ok || w.empty) return;
      ctx.fillStyle = colour;
      ctx.fillRect(sx(approx(w.lower)), y, Math.max(2, sx(approx(w.upper)) - sx(approx(w.lower))), 12);
    });
    const show = (w) => (w.ok ? w.text : w.reason);
    out.className = "";
    out.textContent = [
      `beta_u = ${r.beta_u.exact}`,
      `uniform (blue): ${show(r.uniform)}`,
      `existence, large m (orange): ${show(r.large_m)}`,
      `existence, given m (purple): ${show(r.given_m)}`,
      "top strip: eta-feasible angles in green",
    ].join("\n");
  } catch (e) {
    fail(out, e);
  }
}

function runOracle() {
  const out = $("o-out");
  try {
    const r = JSON.parse(oracleConvergence($("pair").value, $("o-c").value, +$("o-k").value));
    const ks = r.samples.map((s) => s.k);
    const js = r.samples.map((s) => approx(s.j));
    const lim = approx(r.limit);
    const { ctx, sx, sy } = frame($("o-plot"), ks, js.concat([lim]));
    line(ctx, sx, sy, [ks[0], ks[ks.length - 1]], [lim, lim], "#36c");
    line(ctx, sx, sy, ks, js, "#c33");
    const last = r.samples[r.samples.length - 1];
    out.className = "";
    out.textContent = `limit ${r.limit.exact} (recovered ${r.recovered_limit.exact}, match ${r.match}, flat ${r.flat})\nJ_${last.k} = ${last.j.exact}`;
  } catch (e) {
    fail(out, e);
  }
}

await init();
for (const name of JSON.parse(catalogNames())) {
  $("pair").add(new Option(name, name));
}
$("df-run").onclick = runDf;
$("w-run").onclick = runWindows;
$("o-run").onclick = runOracle;
$("status").textContent = "";
runDf();
