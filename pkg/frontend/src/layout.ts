/** Small force-directed layout for the bipartite place/transition graph.
 *
 * Runs synchronously for a fixed number of rounds; nodes the user has
 * dragged are pinned and survive re-layouts for the life of a session.
 */

export interface LayoutNode {
  id: string;
  kind: "place" | "transition";
  x: number;
  y: number;
  pinned: boolean;
}

export interface LayoutEdge {
  from: string;
  to: string;
}

export interface Layout {
  nodes: Map<string, LayoutNode>;
  width: number;
  height: number;
}

const SPRING_LENGTH = 130;
const SPRING_STRENGTH = 0.02;
const REPULSION = 14000;
const CENTER_PULL = 0.012;
const ROUNDS = 260;

function seeded(seed: number): () => number {
  let value = seed >>> 0;
  return () => {
    value = (value * 1664525 + 1013904223) >>> 0;
    return value / 0xffffffff;
  };
}

export function computeLayout(
  placeIds: string[],
  transitionIds: string[],
  edges: LayoutEdge[],
  width = 860,
  height = 560,
  pinnedPositions: Map<string, { x: number; y: number }> = new Map(),
): Layout {
  const random = seeded(42);
  const nodes = new Map<string, LayoutNode>();
  const add = (id: string, kind: "place" | "transition") => {
    const pin = pinnedPositions.get(id);
    nodes.set(id, {
      id,
      kind,
      x: pin ? pin.x : width * (0.15 + 0.7 * random()),
      y: pin ? pin.y : height * (0.15 + 0.7 * random()),
      pinned: pin !== undefined,
    });
  };
  placeIds.forEach((id) => add(id, "place"));
  transitionIds.forEach((id) => add(id, "transition"));

  const all = [...nodes.values()];
  for (let round = 0; round < ROUNDS; round++) {
    const cooling = 1 - round / ROUNDS;
    const force = new Map<string, { x: number; y: number }>(
      all.map((n) => [n.id, { x: 0, y: 0 }]),
    );
    for (let i = 0; i < all.length; i++) {
      for (let j = i + 1; j < all.length; j++) {
        const a = all[i]!;
        const b = all[j]!;
        const dx = a.x - b.x;
        const dy = a.y - b.y;
        const dist2 = Math.max(dx * dx + dy * dy, 40);
        const push = REPULSION / dist2;
        const norm = Math.sqrt(dist2);
        force.get(a.id)!.x += (dx / norm) * push;
        force.get(a.id)!.y += (dy / norm) * push;
        force.get(b.id)!.x -= (dx / norm) * push;
        force.get(b.id)!.y -= (dy / norm) * push;
      }
    }
    for (const edge of edges) {
      const a = nodes.get(edge.from);
      const b = nodes.get(edge.to);
      if (!a || !b) continue;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const dist = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
      const pull = SPRING_STRENGTH * (dist - SPRING_LENGTH);
      force.get(a.id)!.x += dx * pull;
      force.get(a.id)!.y += dy * pull;
      force.get(b.id)!.x -= dx * pull;
      force.get(b.id)!.y -= dy * pull;
    }
    for (const node of all) {
      if (node.pinned) continue;
      const f = force.get(node.id)!;
      f.x += (width / 2 - node.x) * CENTER_PULL;
      f.y += (height / 2 - node.y) * CENTER_PULL;
      node.x += Math.max(-14, Math.min(14, f.x)) * cooling;
      node.y += Math.max(-14, Math.min(14, f.y)) * cooling;
      node.x = Math.max(40, Math.min(width - 40, node.x));
      node.y = Math.max(40, Math.min(height - 40, node.y));
    }
  }
  return { nodes, width, height };
}
