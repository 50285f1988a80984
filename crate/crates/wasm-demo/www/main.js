import init, { boundCurve, perturbedVolume, moebiusProjection } from "./pkg/spherevol_wasm.js";

const $ = (id) => document.getElementById(id);

function fmt(x) {
  return Math.abs(x) < 1e-3 && x !== 0 ? x.toExponential(3) : x.toFixed(6);
}

function fillTable(table, header, rows) {
  table.innerHTML = "";
  const head = table.insertRow();
  for (const h of header) head.appendChild(Object.assign(document.createElement("th"), { textContent: h }));
  for (const r of rows) {
    const tr = table.insertRow();
    for (const c of r) tr.insertCell().textContent = c;
  }
}

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
}

function runBound() {
  $("bound-error").textContent = "";
  try {
    const rows = JSON.parse(boundCurve(Number($("kmax").value)));
    const c = $("bound-plot"), ctx = c.getContext("2d"), pad = 40;
    axes(ctx, c.width, c.height, pad);
    const maxB = Math.max(...rows.map((r) => r.bound));
    const x = (k) => pad + ((k - 1) / Math.max(rows.length - 1, 1)) * (c.width - 2 * pad);
    const y = (b) => c.height - pad - (b / maxB) * (c.height - 2 * pad);
    ctx.fillStyle = "#1f5fa8";
    ctx.strokeStyle = "#1f5fa8";
    ctx.beginPath();
    rows.forEach((r, i) => (i ? ctx.lineTo(x(r.k), y(r.bound)) : ctx.moveTo(x(r.k), y(r.bound))));
    ctx.stroke();
    ctx.fillStyle = "#333";
    for (const r of rows) {
      ctx.fillRect(x(r.k) - 2, y(r.bound) - 2, 4, 4);
      ctx.fillText(r.k, x(r.k) - 3, c.height - pad + 14);
    }
    ctx.fillText(maxB.toFixed(1), 4, pad + 4);
    fillTable($("bound-table"), ["k", "L (trapezoid)", "L (AGM)", "π L"],
      rows.map((r) => [r.k, fmt(r.ellipse_length), fmt(r.ellipse_length_agm), fmt(r.bound)]));
  } catch (e) {
    $("bound-error").textContent = e.message ?? String(e);
  }
}

function runPerturb() {
  $("perturb-error").textContent = "";
  try {
    const r = JSON.parse(perturbedVolume(Number($("pk").value), Number($("pamp").value), Number($("pseed").value)));
    fillTable($("perturb-table"), ["quantity", "value"], [
      ["indices (N, S)", `${r.index_north}, ${r.index_south}`],
      ["volume", fmt(r.volume)],
      ["error estimate", fmt(r.error_estimate)],
      ["π L(ξ_k)", fmt(r.bound)],
      ["volume − bound", fmt(r.margin)],
    ]);
    const labels = ["volume", "θ2 dropped", "angle form", "parallel integral", "π L"];
    const c = $("chain-plot"), ctx = c.getContext("2d"), pad = 30;
    axes(ctx, c.width, c.height, pad);
    const lo = r.chain[4] * 0.995, hi = Math.max(...r.chain) * 1.001;
    const bw = (c.width - 2 * pad) / 5;
    r.chain.forEach((v, i) => {
      const h = ((v - lo) / (hi - lo)) * (c.height - 2 * pad);
      ctx.fillStyle = i === 4 ? "#b05a1f" : "#1f5fa8";
      ctx.fillRect(pad + i * bw + 10, c.height - pad - h, bw - 20, h);
      ctx.fillStyle = "#333";
      ctx.fillText(labels[i], pad + i * bw + 10, c.height - pad + 14);
      ctx.fillText(v.toFixed(5), pad + i * bw + 10, c.height - pad - h - 4);
    });
  } catch (e) {
    $("perturb-error").textContent = e.message ?? String(e);
  }
}

function runMoebius() {
  $("moebius-error").textContent = "";
  const nR = 16, nT = 96;
  try {
    const pts = moebiusProjection(Number($("mk").value), nR, nT, Number($("ma").value), Number($("mb").value));
    const c = $("moebius-plot"), ctx = c.getContext("2d");
    ctx.clearRect(0, 0, c.width, c.height);
    const s = c.width / 5, ox = c.width / 2, oy = c.height / 2;
    const at = (it, ir) => {
      const i = 2 * (it * (nR + 1) + ir);
      return [ox + s * pts[i], oy - s * pts[i + 1]];
    };
    ctx.strokeStyle = "rgba(31, 95, 168, 0.55)";
    for (let it = 0; it <= nT; it += 2) {
      ctx.beginPath();
      for (let ir = 0; ir <= nR; ir++) ctx[ir ? "lineTo" : "moveTo"](...at(it, ir));
      ctx.stroke();
    }
    ctx.strokeStyle = "#b05a1f";
    for (const ir of [0, nR]) {
      ctx.beginPath();
      for (let it = 0; it <= nT; it++) ctx[it ? "lineTo" : "moveTo"](...at(it, ir));
      ctx.stroke();
    }
  } catch (e) {
    $("moebius-error").textContent = e.message ?? String(e);
  }
}

await init();
$("bound-run").onclick = runBound;
$("perturb-run").onclick = runPerturb;
for (const id of ["mk", "ma", "mb"]) $(id).oninput = runMoebius;
runBound();
runPerturb();
runMoebius();
