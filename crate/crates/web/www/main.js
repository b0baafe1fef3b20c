import init, { potential_posets, bounds_table, realize_from_roots } from "./pkg/hyperstrata_web.js";

const comp = (c) => "(" + c.join(",") + ")";

function table(headers, rows) {
  const t = document.createElement("table");
  const head = t.insertRow();
  for (const h of headers) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  for (const row of rows) {
    const tr = t.insertRow();
    for (const cell of row) tr.insertCell().textContent = cell;
  }
  return t;
}

function show(id, build) {
  const out = document.getElementById(id);
  out.replaceChildren();
  try {
    out.append(...build());
  } catch (e) {
    const p = document.createElement("p");
    p.className = "error";
    p.textContent = String(e);
    out.append(p);
  }
}

function note(text) {
  const p = document.createElement("p");
  p.textContent = text;
  return p;
}

function onSubmit(id, handler) {
  document.getElementById(id).addEventListener("submit", (ev) => {
    ev.preventDefault();
    handler(new FormData(ev.target));
  });
}

await init();

onSubmit("family", (form) => show("family-out", () => {
  const r = JSON.parse(potential_posets(+form.get("n"), +form.get("s"), form.get("rev") !== null));
  return [
    note(`${r.count} facet sets`),
    table(["facets", "f", "h", "shelling"],
      r.sets.map((x) => [x.facets.map(comp).join(" "), x.f.join(", "), x.h.join(", "), x.shelling.map(comp).join(" ")])),
  ];
}));

onSubmit("bounds", (form) => show("bounds-out", () => {
  const rows = JSON.parse(bounds_table(+form.get("lo"), +form.get("hi")));
  return [table(["n", "s", "f0 bound", "cover upper", "cover lower", "cover lower (rec)"],
    rows.map((r) => [r.n, r.s, r.f0_bound, r.covering_upper, r.covering_lower_trivial, r.covering_lower_recursive]))];
}));

onSubmit("realize", (form) => show("realize-out", () => {
  const r = JSON.parse(realize_from_roots(form.get("roots"), +form.get("s"), 0n));
  const real = r.realization;
  const verdict = r.min_max ? (r.min_max.passed ? "min/max characterization holds" : "min/max check FAILED") : "";
  const vertices = real.vertices.concat(real.degenerate);
  return [
    note(`${real.generic ? "generic" : "non-generic"} slice, ${real.realized_facets.length} facets. ${verdict}`),
    table(["composition", "x", "residual"],
      vertices.map((v) => [comp(v.composition), v.x.map((t) => t.toFixed(6)).join(", "), v.residual.toExponential(1)])),
  ];
}));
