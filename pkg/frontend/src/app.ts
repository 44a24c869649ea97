/**
 * DOM wiring for the workshop UI: SVG map editor, analysis tabs,
 * perspective switcher, comparison pane, and the conflict dialog.
 *
 * All decision logic lives in the tested modules (state, scoring, render,
 * graphEdit); this file only moves data between them and the DOM.
 */

import { LeversApi } from "./api.js";
import {
  addFactor,
  detectSelfLoops,
  layoutOf,
  nextFactorId,
  removeInfluence,
  renameFactor,
  setControllability,
  setLayout,
  upsertInfluence,
} from "./graphEdit.js";
import { edgeStyle, nodeStyle, tabViewModels, truncationNotice } from "./render.js";
import { WorkshopSession } from "./state.js";
import { perspectiveComparison } from "./compare.js";
import type { ControllabilityLevel, FactorDoc } from "./types.js";

const api = new LeversApi(localStorage.getItem("levers.baseUrl") ?? "", localStorage.getItem("levers.token"));
const session = new WorkshopSession(api);

const canvas = document.getElementById("canvas") as unknown as SVGSVGElement;
const tabsBar = document.getElementById("tabs") as HTMLDivElement;
const sidePane = document.getElementById("side-pane") as HTMLDivElement;
const notices = document.getElementById("notices") as HTMLDivElement;
const graphList = document.getElementById("graph-list") as HTMLSelectElement;
const perspectiveSelect = document.getElementById("perspective") as HTMLSelectElement;
const compareOut = document.getElementById("compare-out") as HTMLDivElement;
const conflictDialog = document.getElementById("conflict-dialog") as HTMLDialogElement;

let selected: string | null = null;
let linkSource: string | null = null;

function positionOf(factor: FactorDoc, index: number, count: number) {
  const stored = session.doc ? layoutOf(session.doc, factor.id) : null;
  if (stored) {
    return stored;
  }
  const angle = (2 * Math.PI * index) / Math.max(count, 1);
  return { x: 420 + 280 * Math.cos(angle), y: 320 + 240 * Math.sin(angle) };
}

function svgElement<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS("http://www.w3.org/2000/svg", tag);
}

function drawCanvas(): void {
  canvas.innerHTML = "";
  const doc = session.doc;
  if (!doc) {
    return;
  }
  const members = session.activeMembers();
  const points = new Map(
    doc.factors.map((f, i) => [f.id, positionOf(f, i, doc.factors.length)]),
  );

  for (const influence of doc.influences) {
    const from = points.get(influence.source);
    const to = points.get(influence.target);
    if (!from || !to) continue;
    const style = edgeStyle(influence);
    const line = svgElement("line");
    line.setAttribute("x1", String(from.x));
    line.setAttribute("y1", String(from.y));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y));
    line.setAttribute("stroke", style.stroke);
    line.setAttribute("stroke-width", String(style.width));
    line.setAttribute("marker-end", "url(#arrow)");
    line.addEventListener("dblclick", () => {
      session.edit((d) => removeInfluence(d, influence.source, influence.target));
    });
    canvas.appendChild(line);
  }

  for (const factor of doc.factors) {
    const point = points.get(factor.id)!;
    const style = nodeStyle(factor, session.report, members, session.overrides);
    const group = svgElement("g");
    const circle = svgElement("circle");
    circle.setAttribute("cx", String(point.x));
    circle.setAttribute("cy", String(point.y));
    circle.setAttribute("r", String(style.radius));
    circle.setAttribute("fill", style.fill);
    circle.setAttribute("stroke", style.outline);
    circle.setAttribute("stroke-width", factor.id === selected ? "5" : "3");
    const label = svgElement("text");
    label.setAttribute("x", String(point.x));
    label.setAttribute("y", String(point.y - style.radius - 6));
    label.setAttribute("text-anchor", "middle");
    label.textContent = factor.name;
    group.appendChild(circle);
    group.appendChild(label);

    group.addEventListener("click", (event) => {
      if ((event as MouseEvent).shiftKey && linkSource && linkSource !== factor.id) {
        session.edit((d) => upsertInfluence(d, linkSource!, factor.id));
        linkSource = null;
      } else {
        selected = factor.id;
        linkSource = factor.id;
      }
      refresh();
    });

    let dragging = false;
    group.addEventListener("pointerdown", () => (dragging = true));
    canvas.addEventListener("pointermove", (event) => {
      if (dragging && session.doc) {
        const rect = canvas.getBoundingClientRect();
        const x = (event as PointerEvent).clientX - rect.left;
        const y = (event as PointerEvent).clientY - rect.top;
        session.edit((d) => setLayout(d, factor.id, { x, y }));
      }
    });
    canvas.addEventListener("pointerup", () => (dragging = false));
    canvas.appendChild(group);
  }

  const defs = svgElement("defs");
  defs.innerHTML =
    '<marker id="arrow" viewBox="0 0 10 10" refX="24" refY="5" markerWidth="7" ' +
    'markerHeight="7" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="#555"/></marker>';
  canvas.appendChild(defs);
}

function drawTabs(): void {
  tabsBar.innerHTML = "";
  if (!session.report) {
    return;
  }
  const models = tabViewModels(session.tabs);
  models.forEach((model, index) => {
    const button = document.createElement("button");
    button.className = "tab" + (index === session.activeTab ? " active" : "");
    button.textContent = `${model.label} (score ${model.score})`;
    button.title = model.memberNames.join(", ");
    button.addEventListener("click", () => session.selectTab(index));
    tabsBar.appendChild(button);
  });
}

function drawSidePane(): void {
  sidePane.innerHTML = "";
  const doc = session.doc;
  if (!doc) {
    return;
  }
  if (!selected) {
    sidePane.textContent = "Select a factor; shift-click another to draw an influence.";
    return;
  }
  const factor = doc.factors.find((f) => f.id === selected);
  if (!factor) {
    selected = null;
    return;
  }
  const name = document.createElement("input");
  name.value = factor.name;
  name.addEventListener("change", () => {
    session.edit((d) => renameFactor(d, factor.id, name.value));
  });
  sidePane.appendChild(name);

  const levels: ControllabilityLevel[] = ["easy", "medium", "hard"];
  for (const level of levels) {
    const button = document.createElement("button");
    button.textContent = level;
    button.className = `level ${level}` + (factor.controllability === level ? " active" : "");
    button.addEventListener("click", () => {
      session.edit((d) => setControllability(d, factor.id, level));
    });
    sidePane.appendChild(button);
  }
}

function drawNotices(): void {
  notices.innerHTML = "";
  const doc = session.doc;
  if (!doc) {
    return;
  }
  const lines: string[] = [];
  if (session.dirty) {
    lines.push("Unsaved changes.");
  }
  if (session.selfLoopGuard) {
    lines.push(
      `Analysis needs a loop-free map: remove the self-influence on ${session.selfLoopGuard.join(", ")}` +
        " or model the internal dynamic as a separate factor.",
    );
  } else {
    const loops = detectSelfLoops(doc);
    if (loops.length) {
      lines.push(`Self-influences present on ${loops.join(", ")}; analysis will refuse them.`);
    }
  }
  if (session.report) {
    const notice = truncationNotice(session.report);
    if (notice) {
      lines.push(notice);
    }
    const active = session.tabs[session.activeTab];
    if (active && active.configuration.warnings.length) {
      lines.push(
        `This configuration cannot reach: ${active.configuration.warnings.join(", ")} (extra inputs needed).`,
      );
    }
  }
  if (session.lastError) {
    lines.push(session.lastError);
  }
  for (const text of lines) {
    const div = document.createElement("div");
    div.className = "notice";
    div.textContent = text;
    notices.appendChild(div);
  }
}

function drawPerspectives(): void {
  const doc = session.doc;
  perspectiveSelect.innerHTML = "<option value=''>(own labels)</option>";
  if (!doc) {
    return;
  }
  for (const perspective of doc.perspectives) {
    const option = document.createElement("option");
    option.value = perspective.label;
    option.textContent = perspective.label;
    perspectiveSelect.appendChild(option);
  }
}

function refresh(): void {
  drawCanvas();
  drawTabs();
  drawSidePane();
  drawNotices();
  if (session.conflict && !conflictDialog.open) {
    (conflictDialog.querySelector("p") as HTMLParagraphElement).textContent =
      session.conflict.message;
    conflictDialog.showModal();
  }
}

async function refreshGraphList(): Promise<void> {
  const listing = await api.listGraphs();
  graphList.innerHTML = "";
  for (const graph of listing.graphs) {
    const option = document.createElement("option");
    option.value = graph.id;
    option.textContent = `${graph.title || graph.id} [v${graph.version}]`;
    graphList.appendChild(option);
  }
}

function bindToolbar(): void {
  document.getElementById("open")!.addEventListener("click", async () => {
    if (graphList.value) {
      await session.open(graphList.value);
      selected = null;
    }
  });
  document.getElementById("add-factor")!.addEventListener("click", () => {
    if (!session.doc) {
      return;
    }
    const id = nextFactorId(session.doc);
    session.edit((d) => addFactor(d, id, `Factor ${id.slice(1)}`));
    selected = id;
  });
  document.getElementById("save")!.addEventListener("click", () => void session.save());
  document.getElementById("analyze")!.addEventListener("click", () => void session.analyze());
  perspectiveSelect.addEventListener("change", () => {
    session.usePerspectiveLabel(perspectiveSelect.value || null);
  });
  document.getElementById("compare")!.addEventListener("click", async () => {
    const doc = session.doc;
    if (!doc || doc.perspectives.length < 2) {
      compareOut.textContent = "Define at least two perspectives to compare.";
      return;
    }
    const [p1, p2] = doc.perspectives;
    const diff = await api.comparePerspectives(doc, p1.label, p2.label);
    const view = perspectiveComparison(diff, p1.label, p2.label);
    compareOut.innerHTML = "";
    for (const columnModel of view.columns) {
      const block = document.createElement("div");
      block.className = "compare-column";
      const heading = document.createElement("h4");
      heading.textContent = columnModel.heading;
      block.appendChild(heading);
      for (const row of columnModel.rows) {
        const line = document.createElement("div");
        line.textContent = `${row.rank}. (${row.score}) ${row.members.join(", ")}`;
        block.appendChild(line);
      }
      compareOut.appendChild(block);
    }
    const footer = document.createElement("p");
    footer.textContent = view.sharedBest
      ? "Both perspectives agree on the best configuration."
      : `Views diverge on: ${[...view.highlight].join(", ")}`;
    compareOut.appendChild(footer);
  });
  document.getElementById("conflict-reload")!.addEventListener("click", async () => {
    conflictDialog.close();
    await session.reloadFromServer();
  });
  document.getElementById("conflict-keep")!.addEventListener("click", () => {
    conflictDialog.close();
  });
}

session.subscribe(refresh);
bindToolbar();
void refreshGraphList();
