/** Pure projection of protocol responses into renderable structure.
 *
 * Nothing here decides enabledness or moves tokens: the view model is a
 * reshaping of the last server response, so whatever the engine says is
 * exactly what becomes clickable and visible.
 */

import type {
  ActionRequest,
  EnabledSets,
  NetJson,
  ReverseMode,
  StateJson,
} from "./protocol.js";

export interface BondView {
  a: string;
  b: string;
  label: string;
}

export interface PlaceView {
  name: string;
  /** Stand-alone token glyphs drawn inside the place. */
  tokens: string[];
  /** Bond edges drawn as lines between token glyphs. */
  bonds: BondView[];
}

export interface ModeBadges {
  forward: boolean;
  bt: boolean;
  co: boolean;
  oco: boolean;
}

export interface TransitionView {
  name: string;
  /** "[k1, k2]" per the drawing convention, null when never fired. */
  historyBadge: string | null;
  badges: ModeBadges;
}

export interface ArcView {
  from: string;
  to: string;
  kind: "in" | "out";
  entries: string[];
}

export interface ViewModel {
  netName: string;
  places: PlaceView[];
  transitions: TransitionView[];
  arcs: ArcView[];
  /** Verbatim last protocol response fields. */
  state: StateJson;
  enabled: EnabledSets;
  log: string[];
}

function splitEntities(entities: string[]): { tokens: string[]; bonds: BondView[] } {
  const tokens: string[] = [];
  const bonds: BondView[] = [];
  for (const entity of entities) {
    const dash = entity.indexOf("-");
    if (dash === -1) {
      tokens.push(entity);
    } else {
      bonds.push({
        a: entity.slice(0, dash),
        b: entity.slice(dash + 1),
        label: entity,
      });
    }
  }
  return { tokens, bonds };
}

function historyBadge(keys: number[] | undefined): string | null {
  if (!keys || keys.length === 0) {
    return null;
  }
  return `[${[...keys].sort((x, y) => x - y).join(", ")}]`;
}

export function buildViewModel(
  net: NetJson,
  state: StateJson,
  enabled: EnabledSets,
  log: string[] = [],
): ViewModel {
  const places: PlaceView[] = net.places.map((name) => {
    const { tokens, bonds } = splitEntities(state.marking[name] ?? []);
    return { name, tokens, bonds };
  });
  const transitions: TransitionView[] = Object.keys(net.transitions)
    .sort()
    .map((name) => ({
      name,
      historyBadge: historyBadge(state.history[name]),
      badges: {
        forward: enabled.forward.includes(name),
        bt: enabled.bt.includes(name),
        co: enabled.co.includes(name),
        oco: enabled.oco.includes(name),
      },
    }));
  const arcs: ArcView[] = [];
  for (const [name, io] of Object.entries(net.transitions)) {
    for (const [place, entries] of Object.entries(io.in)) {
      arcs.push({ from: place, to: name, kind: "in", entries });
    }
    for (const [place, entries] of Object.entries(io.out)) {
      arcs.push({ from: name, to: place, kind: "out", entries });
    }
  }
  arcs.sort((x, y) => (x.from + x.to).localeCompare(y.from + y.to));
  return { netName: net.name, places, transitions, arcs, state, enabled, log };
}

/** Every action the view offers for clicking: exactly the server's
 * enabled sets, flattened. */
export function clickableActions(vm: ViewModel): ActionRequest[] {
  const actions: ActionRequest[] = vm.enabled.forward.map((transition) => ({
    direction: "forward" as const,
    transition,
  }));
  for (const mode of ["bt", "co", "oco"] as ReverseMode[]) {
    for (const transition of vm.enabled[mode]) {
      actions.push({ direction: "reverse", transition, mode });
    }
  }
  return actions;
}

export function describeAction(action: ActionRequest): string {
  return action.direction === "forward"
    ? `fire ${action.transition}`
    : `reverse ${action.transition} mode=${action.mode}`;
}

/** The marking exactly as the view renders it: place -> sorted entity
 * names, stand-alone tokens and bond lines together. */
export function renderedMarking(vm: ViewModel): Record<string, string[]> {
  const marking: Record<string, string[]> = {};
  for (const place of vm.places) {
    const entities = [...place.tokens, ...place.bonds.map((b) => b.label)];
    if (entities.length > 0) {
      marking[place.name] = entities.sort();
    }
  }
  return marking;
}
