import init, { voteCurve, syntheticHistogram, compareMethods } from "./pkg/costeval_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function bars(canvas, values, labels, zeroAt) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const lo = Math.min(0, ...values);
  const hi = Math.max(0, ...values);
  const span = hi - lo || 1;
  const y = (v) => height - 20 - ((v - lo) / span) * (height - 30);
  const w = width / values.length;
  values.forEach((v, i) => {
    ctx.fillStyle = i === zeroAt ? "#c44" : "#468";
    const top = Math.min(y(v), y(0));
    ctx.fillRect(i * w + 1, top, Math.max(w - 2, 1), Math.abs(y(v) - y(0)));
  });
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(0, y(0));
  ctx.lineTo(width, y(0));
  ctx.stroke();
  ctx.fillStyle = "#333";
  ctx.font = "11px system-ui";
  const step = Math.ceil(labels.length / 12);
  labels.forEach((l, i) => {
    if (i % step === 0) ctx.fillText(l, i * w + 2, height - 5);
  });
}

function drawVotes() {
  const curve = JSON.parse(voteCurve(num("vote-total")));
  bars($("vote-canvas"), curve.map((p) => p.delta), curve.map((p) => `${p.yes}:${p.no}`));
}

function drawHistogram() {
  const bins = JSON.parse(syntheticHistogram(num("h-n"), num("h-dim"), num("h-sigma"), num("h-seed"), num("h-bins")));
  const zero = bins.findIndex((b) => b.low <= 0 && 0 < b.high);
  bars($("hist-canvas"), bins.map((b) => b.count), bins.map((b) => b.low.toFixed(2)), zero);
}

function compare() {
  const pct = (x) => (100 * x).toFixed(2);
  const rows = JSON.parse(compareMethods(num("c-n"), num("c-dim"), num("c-sigma"), num("c-seed"), $("c-methods").value));
  const body = rows
    .map((r) => `<tr><td>${r.method}</td><td>${r.n_fit}</td><td>${pct(r.nec)}</td><td>${pct(r.error_rate)}</td>` +
      `<td>${r.ratio == null ? "-" : r.ratio.toFixed(2)}</td><td>${r.delta_mae == null ? "-" : r.delta_mae.toFixed(3)}</td></tr>`)
    .join("");
  $("c-out").innerHTML = "<table><tr><th>method</th><th>examples fitted</th><th>NEC (%)</th><th>error (%)</th>" +
    `<th>error/NEC</th><th>Δ MAE</th></tr>${body}</table>`;
}

function guarded(f) {
  return () => {
    $("status").textContent = "";
    try {
      f();
    } catch (e) {
      $("status").className = "err";
      $("status").textContent = String(e);
    }
  };
}

await init();
$("vote-total").addEventListener("input", guarded(drawVotes));
$("h-go").addEventListener("click", guarded(drawHistogram));
$("c-go").addEventListener("click", guarded(compare));
guarded(drawVotes)();
guarded(drawHistogram)();
