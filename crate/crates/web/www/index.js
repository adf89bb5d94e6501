import init, { metricIds, surfaceSvg, sensitivitySvg, sensitivity, evaluate } from "./pkg/contingency_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const fmt = (x) => x.toPrecision(6);

function guard(target, f) {
  try {
    f();
  } catch (e) {
    target.innerHTML = `<span class="error">${e.message ?? e}</span>`;
  }
}

function fillSelect(select, ids, chosen) {
  for (const id of ids) {
    select.add(new Option(id, id, false, id === chosen));
  }
}

function drawSurface() {
  const metric = $("surface-metric").value;
  const ratio = num("surface-ratio");
  const t = num("surface-t");
  guard($("surface-plot"), () => {
    $("surface-plot").innerHTML = surfaceSvg(metric, ratio, t, num("surface-levels"), $("surface-cells").checked);
    $("surface-readout").textContent = `sensitivity at 1:${ratio} = ${fmt(sensitivity(metric, ratio, t))}`;
  });
}

function drawCurves() {
  const chosen = [...document.querySelectorAll("#curve-metrics input:checked")].map((c) => c.value);
  guard($("curve-plot"), () => {
    $("curve-plot").innerHTML = chosen.length ? sensitivitySvg(chosen.join(","), num("curve-max"), num("curve-t")) : "";
  });
}

function drawPoint() {
  guard($("point-readout"), () => {
    const v = evaluate($("point-metric").value, num("point-tpr"), num("point-tnr"), num("point-ratio"));
    $("point-readout").textContent = `value = ${fmt(v)}`;
  });
}

await init();
const ids = metricIds();
fillSelect($("surface-metric"), ids, "f1");
fillSelect($("point-metric"), ids, "precision");
const studied = new Set(["accuracy", "precision", "recall", "f1", "tss", "hss", "youden_j"]);
for (const id of ids) {
  const label = document.createElement("label");
  label.innerHTML = `<input type="checkbox" value="${id}"${studied.has(id) ? " checked" : ""}> ${id}`;
  $("curve-metrics").append(label);
}

document.querySelectorAll("[id^=surface-]").forEach((el) => el.addEventListener("change", drawSurface));
document.querySelectorAll("#curve-metrics, #curve-max, #curve-t").forEach((el) => el.addEventListener("change", drawCurves));
document.querySelectorAll("[id^=point-]").forEach((el) => el.addEventListener("input", drawPoint));
drawSurface();
drawCurves();
drawPoint();
