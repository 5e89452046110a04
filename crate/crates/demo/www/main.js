import init, { exponent_curve, capacity_curve_bsc, softcover_trend } from "./pkg/sscap_demo.js";

const num = (id) => Number(document.getElementById(id).value);

// Polyline plot of [x, y] pairs; optional log-scaled axes.
function plot(points, { logx = false, logy = false, xlabel = "", ylabel = "" } = {}) {
  const W = 700, H = 260, pad = 40;
  const fx = logx ? Math.log10 : (v) => v;
  const fy = logy ? Math.log10 : (v) => v;
  const pts = points.filter(([x, y]) => Number.isFinite(fx(x)) && Number.isFinite(fy(y)));
  if (pts.length === 0) return "<p>nothing to plot</p>";
  const xs = pts.map(([x]) => fx(x)), ys = pts.map(([, y]) => fy(y));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const sx = (v) => pad + ((v - x0) / (x1 - x0 || 1)) * (W - 2 * pad);
  const sy = (v) => H - pad - ((v - y0) / (y1 - y0)) * (H - 2 * pad);
  const line = xs.map((x, i) => `${sx(x).toFixed(1)},${sy(ys[i]).toFixed(1)}`).join(" ");
  const fmt = (v, log) => (log ? `1e${v.toFixed(1)}` : v.toPrecision(3));
  return `<svg width="${W}" height="${H}">
    <polyline fill="none" stroke="#1565c0" stroke-width="1.5" points="${line}"/>
    <text x="${pad}" y="${H - 8}">${fmt(x0, logx)}</text>
    <text x="${W - pad}" y="${H - 8}" text-anchor="end">${fmt(x1, logx)} ${xlabel}</text>
    <text x="4" y="${pad - 10}">${fmt(y1, logy)} ${ylabel}</text>
    <text x="4" y="${H - pad}">${fmt(y0, logy)}</text>
  </svg>`;
}

function bind(button, out, run) {
  document.getElementById(button).addEventListener("click", () => {
    const el = document.getElementById(out);
    try {
      el.innerHTML = run();
    } catch (e) {
      el.innerHTML = `<p class="err">${e}</p>`;
    }
  });
}

await init();

bind("ex-go", "ex-out", () => {
  const r = JSON.parse(exponent_curve(num("ex-p"), num("ex-rate"), num("ex-delta")));
  const a = r.alpha_star == null ? "none" : r.alpha_star.toPrecision(4);
  return `<pre>I(U;V) = ${r.mutual_information.toFixed(6)}  gamma_delta = ${r.gamma_delta.toExponential(4)}  alpha* = ${a}</pre>`
    + plot(r.curve, { logx: true, xlabel: "alpha", ylabel: "beta" });
});

bind("cap-go", "cap-out", () => {
  const r = JSON.parse(capacity_curve_bsc(num("cap-p"), num("cap-points")));
  const rows = r.points.map((p) => `${p.alpha.toFixed(3)}  ${p.value.toFixed(6)}  ${p.method}`).join("\n");
  return plot(r.points.map((p) => [p.alpha, p.value]), { xlabel: "alpha", ylabel: "C" })
    + `<pre>non-increasing: ${r.non_increasing}  convex: ${r.convex}\n${rows}</pre>`;
});

bind("sc-go", "sc-out", () => {
  const r = JSON.parse(softcover_trend(num("sc-p"), num("sc-rate"), num("sc-delta"),
    num("sc-n"), num("sc-trials"), BigInt(num("sc-seed"))));
  const rows = r.rows.map((s) => `${s.n}\t${s.codebook_size}\t${s.mean.toExponential(3)}\t${s.max.toExponential(3)}`).join("\n");
  const slope = r.slope_log2_mean == null ? "n/a" : r.slope_log2_mean.toFixed(4);
  return plot(r.rows.map((s) => [s.n, s.mean]), { logy: true, xlabel: "n", ylabel: "mean D" })
    + `<pre>slope of log2 mean D: ${slope}\nn\t|C|\tmean D\tmax D\n${rows}</pre>`;
});
