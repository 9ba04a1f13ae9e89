import init, { extremum_grid, sample_and_detect, labelled_moments } from "./pkg/edgecount_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function color(v, scale) {
  const t = scale > 0 ? Math.max(-1, Math.min(1, v / scale)) : 0;
  const a = Math.round(255 * (1 - Math.abs(t)));
  return t >= 0 ? `rgb(255,${a},${a})` : `rgb(${a},${a},255)`;
}

function heatmap(canvas, cells, m, n, pick, marks) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const cw = canvas.width / (n + 1);
  const ch = canvas.height / (m + 1);
  const scale = Math.max(...cells.map((c) => Math.abs(pick(c))));
  for (const c of cells) {
    ctx.fillStyle = color(pick(c), scale);
    ctx.fillRect(c[1] * cw, c[0] * ch, cw, ch);
  }
  ctx.strokeStyle = "#000";
  ctx.lineWidth = 2;
  for (const [d1, d2] of marks) {
    ctx.beginPath();
    ctx.arc((d2 + 0.5) * cw, (d1 + 0.5) * ch, Math.min(cw, ch) * 0.45, 0, 2 * Math.PI);
    ctx.stroke();
  }
}

function matrix() {
  return [num("p11"), num("p12"), num("p21"), num("p22")];
}

function show(id, fn) {
  try {
    fn();
  } catch (e) {
    $(id).innerHTML = `<p class="err">${e}</p>`;
  }
}

function drawGrid() {
  show("grid-out", () => {
    const [p11, p12, p21, p22] = matrix();
    const r = JSON.parse(extremum_grid(p11, p12, p21, p22, num("m"), num("n")));
    heatmap($("grid-zd"), r.cells, r.m, r.n, (c) => c[2], r.zd_argmax);
    heatmap($("grid-zw"), r.cells, r.m, r.n, (c) => c[3], r.zw_extremum);
    $("grid-out").textContent =
      `left: Z_d, extremum at ${JSON.stringify(r.zd_argmax)}; ` +
      `right: Z_w (${r.lead_w >= 0 ? "max" : "min"}), extremum at ${JSON.stringify(r.zw_extremum)}`;
  });
}

function drawAdjacency(r) {
  const chosen = r.candidates.find((c) => c.method === r.selected).labels;
  // nodes the fit labels 1 first, truth as a tiebreak so errors stand out
  const order = [...Array(r.nodes).keys()].sort((a, b) => chosen[b] - chosen[a] || r.truth[b] - r.truth[a] || a - b);
  const pos = new Array(r.nodes);
  order.forEach((node, i) => (pos[node] = i));
  const canvas = $("adj");
  const ctx = canvas.getContext("2d");
  const s = canvas.width / r.nodes;
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  for (const [u, v] of r.edges) {
    const same = chosen[u] === chosen[v];
    ctx.fillStyle = same ? (chosen[u] === 1 ? "#c33" : "#36c") : "#888";
    ctx.fillRect(pos[v] * s, pos[u] * s, s, s);
    if (!r.directed) ctx.fillRect(pos[u] * s, pos[v] * s, s, s);
  }
}

function runDetect() {
  show("detect-out", () => {
    const [p11, p12, p21, p22] = matrix();
    const r = JSON.parse(
      sample_and_detect(p11, p12, p21, p22, num("m"), num("n"), $("directed").checked, $("criterion").value, num("seed")),
    );
    drawAdjacency(r);
    const rows = r.candidates
      .map((c) => `<tr><td>${c.method}${c.method === r.selected ? " (selected)" : ""}</td>` +
        `<td>${c.statistic.toFixed(3)}</td><td>${c.score === null ? "" : c.score.toFixed(3)}</td><td>${c.error.toFixed(3)}</td></tr>`)
      .join("");
    $("detect-out").innerHTML =
      `<table><tr><th>fit</th><th>statistic</th><th>${r.criterion} score</th><th>error</th></tr>${rows}</table>` +
      (r.tie ? "<p>criterion tie</p>" : "");
  });
}

function runMoments() {
  show("moments-out", () => {
    const r = JSON.parse(labelled_moments($("edges").value, $("labels").value, $("m-directed").checked));
    $("moments-out").textContent = JSON.stringify(r, null, 2);
  });
}

await init();
$("grid-run").onclick = drawGrid;
$("detect-run").onclick = runDetect;
$("moments-run").onclick = runMoments;
drawGrid();
