/** SVG rendering of a view model over a computed layout.
 *
 * Clicking a transition box fires it forward; the bt/co/oco badges
 * request the corresponding reversal. Only actions the server reported
 * enabled are clickable; everything else explains itself via tooltip.
 */

import type { Layout } from "./layout.js";
import type { ActionRequest } from "./protocol.js";
import type { PlaceView, TransitionView, ViewModel } from "./viewmodel.js";

export interface RenderHandlers {
  onAction(action: ActionRequest): void;
  onDragNode(id: string, x: number, y: number): void;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function tokenSpots(count: number, cx: number, cy: number): { x: number; y: number }[] {
  if (count === 1) {
    return [{ x: cx, y: cy }];
  }
  const radius = count === 2 ? 11 : 15;
  return Array.from({ length: count }, (_, i) => {
    const angle = (2 * Math.PI * i) / count - Math.PI / 2;
    return { x: cx + radius * Math.cos(angle), y: cy + radius * Math.sin(angle) };
  });
}

function renderPlace(place: PlaceView, x: number, y: number): SVGGElement {
  const group = el("g", { class: "place", "data-place": place.name });
  group.appendChild(el("circle", {
    cx: String(x), cy: String(y), r: "30",
    fill: "#fdfdf6", stroke: "#444", "stroke-width": "1.4",
  }));
  group.appendChild(el("text", {
    x: String(x), y: String(y - 38), "text-anchor": "middle",
    class: "place-name", "font-size": "13",
  }, place.name));
  const spots = new Map<string, { x: number; y: number }>();
  tokenSpots(place.tokens.length, x, y).forEach((spot, i) => {
    spots.set(place.tokens[i]!, spot);
  });
  for (const bond of place.bonds) {
    const a = spots.get(bond.a);
    const b = spots.get(bond.b);
    if (!a || !b) continue;
    const line = el("line", {
      x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
      stroke: "#b5651d", "stroke-width": "2", class: "bond",
    });
    line.appendChild(el("title", {}, bond.label));
    group.appendChild(line);
  }
  for (const token of place.tokens) {
    const spot = spots.get(token)!;
    const glyph = el("circle", {
      cx: String(spot.x), cy: String(spot.y), r: "5.5",
      fill: "#222", class: "token", "data-token": token,
    });
    glyph.appendChild(el("title", {}, token));
    group.appendChild(glyph);
    group.appendChild(el("text", {
      x: String(spot.x + 7), y: String(spot.y + 4),
      "font-size": "11", class: "token-name",
    }, token));
  }
  return group;
}

const MODE_LABELS: ["bt", "co", "oco"] = ["bt", "co", "oco"];

function renderTransition(
  view: TransitionView,
  x: number,
  y: number,
  handlers: RenderHandlers,
): SVGGElement {
  const group = el("g", { class: "transition", "data-transition": view.name });
  const box = el("rect", {
    x: String(x - 30), y: String(y - 16), width: "60", height: "32",
    fill: view.badges.forward ? "#e8f2ff" : "#eee",
    stroke: "#333", "stroke-width": "1.4", rx: "3",
    class: view.badges.forward ? "fireable" : "inert",
  });
  box.appendChild(el("title", {}, view.badges.forward
    ? `fire ${view.name}`
    : `${view.name} is not forward-enabled`));
  if (view.badges.forward) {
    box.addEventListener("click", () =>
      handlers.onAction({ direction: "forward", transition: view.name }));
  }
  group.appendChild(box);
  group.appendChild(el("text", {
    x: String(x), y: String(y + 4), "text-anchor": "middle",
    "font-size": "13", "font-weight": "600",
  }, view.name));
  if (view.historyBadge) {
    group.appendChild(el("text", {
      x: String(x), y: String(y - 22), "text-anchor": "middle",
      "font-size": "11", fill: "#0a4", class: "history-badge",
    }, view.historyBadge));
  }
  MODE_LABELS.forEach((mode, i) => {
    const enabled = view.badges[mode];
    const bx = x - 30 + i * 21;
    const badge = el("g", {
      class: `mode-badge ${mode} ${enabled ? "enabled" : "disabled"}`,
    });
    const rect = el("rect", {
      x: String(bx), y: String(y + 18), width: "19", height: "13",
      rx: "2", fill: enabled ? "#ffe9c7" : "#f4f4f4",
      stroke: enabled ? "#b5651d" : "#ccc", "stroke-width": "1",
    });
    rect.appendChild(el("title", {}, enabled
      ? `reverse ${view.name} mode=${mode}`
      : `${view.name} is not ${mode}-reversible here`));
    if (enabled) {
      rect.addEventListener("click", () =>
        handlers.onAction({ direction: "reverse", transition: view.name, mode }));
    }
    badge.appendChild(rect);
    badge.appendChild(el("text", {
      x: String(bx + 9.5), y: String(y + 28), "text-anchor": "middle",
      "font-size": "9", fill: enabled ? "#7a3d00" : "#999",
      "pointer-events": "none",
    }, mode));
    group.appendChild(badge);
  });
  return group;
}

export function renderNet(
  vm: ViewModel,
  layout: Layout,
  handlers: RenderHandlers,
): SVGSVGElement {
  const svg = el("svg", {
    viewBox: `0 0 ${layout.width} ${layout.height}`,
    width: String(layout.width),
    height: String(layout.height),
    class: "net-canvas",
  });
  const marker = el("marker", {
    id: "arrow", viewBox: "0 0 8 8", refX: "7", refY: "4",
    markerWidth: "7", markerHeight: "7", orient: "auto-start-reverse",
  });
  marker.appendChild(el("path", { d: "M0,0 L8,4 L0,8 z", fill: "#666" }));
  const defs = el("defs");
  defs.appendChild(marker);
  svg.appendChild(defs);

  for (const arc of vm.arcs) {
    const from = layout.nodes.get(arc.from);
    const to = layout.nodes.get(arc.to);
    if (!from || !to) continue;
    const line = el("line", {
      x1: String(from.x), y1: String(from.y),
      x2: String(to.x), y2: String(to.y),
      stroke: "#888", "stroke-width": "1.2", "marker-end": "url(#arrow)",
      class: `arc ${arc.kind}`,
    });
    line.appendChild(el("title", {}, arc.entries.join(", ")));
    svg.appendChild(line);
    svg.appendChild(el("text", {
      x: String((from.x + to.x) / 2),
      y: String((from.y + to.y) / 2 - 4),
      "font-size": "10", fill: "#777", "text-anchor": "middle",
      class: "arc-label",
    }, arc.entries.join(", ")));
  }

  const byName = new Map(vm.transitions.map((t) => [t.name, t]));
  for (const node of layout.nodes.values()) {
    let group: SVGGElement;
    if (node.kind === "place") {
      const place = vm.places.find((p) => p.name === node.id);
      if (!place) continue;
      group = renderPlace(place, node.x, node.y);
    } else {
      const view = byName.get(node.id);
      if (!view) continue;
      group = renderTransition(view, node.x, node.y, handlers);
    }
    attachDrag(group, svg, node.id, handlers);
    svg.appendChild(group);
  }
  return svg;
}

function attachDrag(
  group: SVGGElement,
  svg: SVGSVGElement,
  id: string,
  handlers: RenderHandlers,
): void {
  let dragging = false;
  let moved = false;
  const toLocal = (event: MouseEvent) => {
    const rect = svg.getBoundingClientRect();
    return { x: event.clientX - rect.left, y: event.clientY - rect.top };
  };
  group.addEventListener("mousedown", (event) => {
    dragging = true;
    moved = false;
    event.preventDefault();
  });
  svg.addEventListener("mousemove", (event) => {
    if (!dragging) return;
    moved = true;
    const point = toLocal(event);
    handlers.onDragNode(id, point.x, point.y);
  });
  svg.addEventListener("mouseup", () => {
    if (dragging && moved) {
      // suppress the click that follows a drag
      group.addEventListener("click", (e) => e.stopPropagation(),
        { capture: true, once: true });
    }
    dragging = false;
  });
}
