import init, { parse, presupposition, scenarios, replay_steps } from "./pkg/iqgame_web.js";

const $ = (id) => document.getElementById(id);

function show(target, result, render) {
  target.classList.toggle("error", !result.ok);
  target.textContent = result.ok ? render(result) : result.error;
}

function cell(c) {
  const td = document.createElement("td");
  if (c) {
    td.textContent = c.unicode;
    if (c.refused) td.className = "refused";
  }
  return td;
}

function number(n) {
  const td = document.createElement("td");
  td.className = "no";
  td.textContent = n;
  return td;
}

let replayed = null;

function drawStep(i) {
  const step = replayed.steps[i];
  const before = i > 0 ? replayed.steps[i - 1].entries : 0;
  $("step-label").textContent = step.move;
  $("status").textContent = step.status;
  const table = $("tableau");
  table.replaceChildren();
  const head = table.insertRow();
  for (const h of ["#", "Source of information", `Inquirer: ${replayed.inquirer}`, "#"]) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  for (const row of step.rows) {
    const tr = table.insertRow();
    const seqs = [row.left, row.right].filter(Boolean).map((c) => c.seq);
    if (seqs.some((s) => s > before)) tr.className = "fresh";
    tr.append(number(row.left_no), cell(row.left), cell(row.right), number(row.right_no));
  }
}

function loadScenario(name) {
  const result = JSON.parse(replay_steps(name));
  if (!result.ok) {
    $("status").textContent = result.error;
    return;
  }
  replayed = result;
  const slider = $("step");
  slider.max = result.steps.length - 1;
  slider.value = 0;
  drawStep(0);
}

await init();

$("parse").onclick = () =>
  show($("parse-out"), JSON.parse(parse($("formula").value)), (r) =>
    `${r.canonical}\n${r.unicode}\nfree variables: ${r.free_variables.join(", ") || "none"}`);

$("presup").onclick = () =>
  show($("presup-out"), JSON.parse(presupposition($("question").value)), (r) =>
    `${r.kind} question\npresupposition: ${r.unicode}\ntautology: ${r.tautology}`);

const select = $("scenario");
for (const s of JSON.parse(scenarios()).scenarios) {
  select.add(new Option(`${s.name} (${s.moves} moves)`, s.name));
}
select.onchange = () => loadScenario(select.value);
$("step").oninput = (e) => drawStep(Number(e.target.value));
loadScenario(select.value);
