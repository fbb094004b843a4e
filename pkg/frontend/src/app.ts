/** Application shell: loads a net into a server session and steers it.
 *
 * Every state shown comes from a server response; the client never
 * predicts. Dragged node positions persist for the session.
 */

import { computeLayout, type LayoutEdge } from "./layout.js";
import {
  Client,
  ProtocolError,
  type ActionRequest,
  type EnabledSets,
  type NetJson,
  type StateJson,
} from "./protocol.js";
import { renderNet } from "./render.js";
import { buildViewModel, describeAction } from "./viewmodel.js";

interface SessionHandle {
  id: string;
  net: NetJson;
  state: StateJson;
  enabled: EnabledSets;
  log: string[];
  pinned: Map<string, { x: number; y: number }>;
}

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function startApp(): void {
  const client = new Client(
    (byId<HTMLInputElement>("server-url")).value.replace(/\/$/, ""));
  let session: SessionHandle | null = null;

  const canvasHost = byId<HTMLDivElement>("canvas");
  const logList = byId<HTMLUListElement>("action-log");
  const statusLine = byId<HTMLDivElement>("status");
  const errorPanel = byId<HTMLDivElement>("error-panel");

  function setStatus(text: string, isError = false): void {
    statusLine.textContent = text;
    statusLine.className = isError ? "status error" : "status";
  }

  function showLoadError(message: string): void {
    errorPanel.textContent = message;
    errorPanel.style.display = "block";
  }

  function redraw(): void {
    if (!session) return;
    const vm = buildViewModel(session.net, session.state, session.enabled,
      session.log);
    const edges: LayoutEdge[] = vm.arcs.map((a) => ({ from: a.from, to: a.to }));
    const layout = computeLayout(
      session.net.places,
      Object.keys(session.net.transitions),
      edges,
      canvasHost.clientWidth || 860,
      560,
      session.pinned,
    );
    canvasHost.replaceChildren(renderNet(vm, layout, {
      onAction: (action) => void applyAction(action),
      onDragNode: (id, x, y) => {
        session?.pinned.set(id, { x, y });
        redraw();
      },
    }));
    logList.replaceChildren(...session.log.map((entry) => {
      const item = document.createElement("li");
      item.textContent = entry;
      return item;
    }));
  }

  async function applyAction(action: ActionRequest): Promise<void> {
    if (!session) return;
    try {
      const response = await client.step(session.id, action);
      session.state = response.state;
      session.enabled = response.enabled;
      session.log.push(describeAction(action));
      setStatus(`applied: ${describeAction(action)}`);
      redraw();
    } catch (error) {
      if (error instanceof ProtocolError && error.status === 409) {
        setStatus(`not enabled: ${error.message}`, true);
        return;
      }
      setStatus(String(error), true);
    }
  }

  byId<HTMLButtonElement>("load-button").addEventListener("click", async () => {
    errorPanel.style.display = "none";
    const text = byId<HTMLTextAreaElement>("net-text").value;
    try {
      const created = await client.createSession(text);
      const full = await client.getSession(created.id);
      session = {
        id: created.id,
        net: full.net,
        state: full.state,
        enabled: full.enabled,
        log: [],
        pinned: new Map(),
      };
      setStatus(`loaded ${full.net.name} (session ${created.id})`);
      redraw();
    } catch (error) {
      if (error instanceof ProtocolError) {
        showLoadError(error.message);
      } else {
        showLoadError(String(error));
      }
    }
  });

  byId<HTMLButtonElement>("undo-button").addEventListener("click", async () => {
    if (!session) return;
    try {
      const response = await client.undo(session.id);
      session.state = response.state;
      session.enabled = response.enabled;
      session.log.push("undo");
      setStatus("undid the last step");
      redraw();
    } catch (error) {
      if (error instanceof ProtocolError && error.status === 409) {
        setStatus(error.message, true);
        return;
      }
      setStatus(String(error), true);
    }
  });
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  startApp();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", () => startApp());
}
