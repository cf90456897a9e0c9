/** Single-page view over the path-controller API.
 *
 * Stateless beyond view caches: every render is a pure function of the
 * latest API snapshots, so a page reload against the same simulator
 * state reproduces the identical display.
 */

import {
  ApiClient,
  ApiError,
  FadInfo,
  LinkInfo,
  TopologyInfo,
  VrfInfo,
} from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const VIEW = 420;
const RADIUS = 150;

const METRICS = ["igp", "te-metric", "delay"] as const;
const OPS = ["exclude-any", "include-any", "include-all"] as const;

const OVERLAY_PALETTE = [
  "#d33682",
  "#268bd2",
  "#859900",
  "#cb4b16",
  "#6c71c4",
];

export interface AppOptions {
  /** Refresh period in milliseconds; 0 disables the poll timer. */
  pollMs?: number;
}

export interface OverlayState {
  vrf: string;
  algo: number;
  path: number[];
  ingressLabels: number[];
}

export interface App {
  refresh(): Promise<void>;
  dispose(): void;
}

interface Snapshot {
  topology: TopologyInfo;
  fads: FadInfo[];
  vrfs: VrfInfo[];
  overlays: OverlayState[];
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function svgEl(
  doc: Document,
  tag: string,
  attrs: Record<string, string> = {},
  text?: string,
): Element {
  const node = doc.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

/** Deterministic circular layout: node positions depend only on the id set. */
export function layoutNodes(ids: number[]): Map<number, { x: number; y: number }> {
  const sorted = [...ids].sort((a, b) => a - b);
  const centre = VIEW / 2;
  const positions = new Map<number, { x: number; y: number }>();
  sorted.forEach((id, index) => {
    const angle = (2 * Math.PI * index) / sorted.length - Math.PI / 2;
    positions.set(id, {
      x: Math.round(centre + RADIUS * Math.cos(angle)),
      y: Math.round(centre + RADIUS * Math.sin(angle)),
    });
  });
  return positions;
}

/** Host .4 of an attachment prefix, the conventional probe target. */
export function probeAddress(prefix: string): string {
  const network = prefix.split("/")[0] ?? "";
  const octets = network.split(".");
  octets[3] = String(Number(octets[3]) + 4);
  return octets.join(".");
}

function undirectedLinks(links: LinkInfo[]): LinkInfo[] {
  return links.filter((l) => l.from < l.to);
}

export function createApp(
  root: HTMLElement,
  api: ApiClient,
  options: AppOptions = {},
): App {
  const doc = root.ownerDocument;
  const pollMs = options.pollMs ?? 1000;

  // --- static skeleton ------------------------------------------------------
  root.replaceChildren();
  const banner = el(doc, "div", { id: "banner", class: "banner", hidden: "" });
  const toast = el(doc, "div", { id: "toast", class: "toast" });
  const svg = svgEl(doc, "svg", {
    id: "topology",
    viewBox: `0 0 ${VIEW} ${VIEW}`,
    width: String(VIEW),
    height: String(VIEW),
  });
  const fadList = el(doc, "div", { id: "fads", class: "cards" });
  const vrfList = el(doc, "div", { id: "vrfs", class: "cards" });

  const metricSelect = el(doc, "select", { id: "fad-metric" });
  for (const metric of METRICS) {
    metricSelect.append(el(doc, "option", { value: metric }, metric));
  }
  const opSelect = el(doc, "select", { id: "fad-op" });
  for (const op of OPS) {
    opSelect.append(el(doc, "option", { value: op }, op));
  }
  const colorBox = el(doc, "fieldset", { id: "fad-colors" });
  const targetNote = el(doc, "span", { id: "fad-target" }, "target: –");
  const submitButton = el(doc, "button", { id: "fad-submit", type: "button" }, "Request path");
  const fadForm = el(doc, "form", { id: "fad-form" });
  fadForm.append(metricSelect, opSelect, colorBox, targetNote, submitButton);

  const delaySelect = el(doc, "select", { id: "delay-link" });
  const delayInput = el(doc, "input", {
    id: "delay-us",
    type: "number",
    min: "1",
    value: "10",
  });
  const delayButton = el(doc, "button", { id: "delay-submit", type: "button" }, "Set delay");
  const delayReportBox = el(doc, "div", { id: "delay-report" });
  const delayForm = el(doc, "form", { id: "delay-form" });
  delayForm.append(delaySelect, delayInput, delayButton, delayReportBox);

  root.append(banner, toast, svg, fadList, vrfList, fadForm, delayForm);

  // --- view state -----------------------------------------------------------
  let snapshot: Snapshot | null = null;
  let targetColor: number | null = null;
  let pending = false;
  let disposed = false;

  function setBanner(message: string | null): void {
    if (message === null) {
      banner.setAttribute("hidden", "");
      banner.textContent = "";
      root.classList.remove("stale");
    } else {
      banner.removeAttribute("hidden");
      banner.textContent = message;
      root.classList.add("stale");
    }
  }

  function setToast(message: string, kind: "ok" | "error"): void {
    toast.textContent = message;
    toast.setAttribute("data-kind", kind);
  }

  function setPending(value: boolean): void {
    pending = value;
    for (const button of [submitButton, delayButton]) {
      if (value) {
        button.setAttribute("disabled", "");
      } else {
        button.removeAttribute("disabled");
      }
    }
  }

  // --- rendering ------------------------------------------------------------
  function renderTopology(snap: Snapshot): void {
    const positions = layoutNodes(snap.topology.nodes.map((n) => n.id));
    while (svg.firstChild) {
      svg.removeChild(svg.firstChild);
    }
    for (const link of undirectedLinks(snap.topology.links)) {
      const a = positions.get(link.from);
      const b = positions.get(link.to);
      if (!a || !b) continue;
      svg.append(
        svgEl(doc, "line", {
          class: "link",
          "data-link": link.id,
          x1: String(a.x),
          y1: String(a.y),
          x2: String(b.x),
          y2: String(b.y),
        }),
      );
      const badge = [
        `igp ${link.igp}`,
        `te ${link.te}`,
        `${link.delay_us}µs`,
        link.colors.length ? link.colors.join(",") : "-",
      ].join(" | ");
      svg.append(
        svgEl(
          doc,
          "text",
          {
            class: "link-badge",
            "data-link": link.id,
            x: String((a.x + b.x) / 2),
            y: String((a.y + b.y) / 2 - 6),
          },
          badge,
        ),
      );
    }
    snap.overlays.forEach((overlay, index) => {
      const points = overlay.path
        .map((node) => positions.get(node))
        .filter((p): p is { x: number; y: number } => p !== undefined)
        .map((p) => `${p.x},${p.y}`)
        .join(" ");
      svg.append(
        svgEl(doc, "polyline", {
          class: "overlay",
          "data-vrf": overlay.vrf,
          "data-algo": String(overlay.algo),
          "data-path": overlay.path.join(","),
          "data-labels": overlay.ingressLabels.join(","),
          points,
          fill: "none",
          stroke: OVERLAY_PALETTE[index % OVERLAY_PALETTE.length] ?? "#000",
        }),
      );
    });
    for (const node of snap.topology.nodes) {
      const pos = positions.get(node.id);
      if (!pos) continue;
      svg.append(
        svgEl(doc, "circle", {
          class: "node",
          "data-node": String(node.id),
          cx: String(pos.x),
          cy: String(pos.y),
          r: "16",
        }),
      );
      svg.append(
        svgEl(
          doc,
          "text",
          {
            class: "node-label",
            x: String(pos.x),
            y: String(pos.y + 4),
            "text-anchor": "middle",
          },
          `R${node.id}`,
        ),
      );
    }
  }

  function renderFads(snap: Snapshot): void {
    fadList.replaceChildren();
    for (const fad of snap.fads) {
      const card = el(doc, "div", { class: "card fad", "data-algo": String(fad.algo) });
      card.append(el(doc, "h3", {}, `FlexAlgo ${fad.algo}`));
      card.append(el(doc, "p", {}, `metric ${fad.metric}`));
      const constraints = fad.constraints
        .map((c) => `${c.op}: ${c.colors.join(", ")}`)
        .join("; ");
      card.append(el(doc, "p", {}, constraints || "unconstrained"));
      card.append(el(doc, "p", {}, `nodes ${fad.participants.join(", ")}`));
      fadList.append(card);
    }
  }

  function renderVrfs(snap: Snapshot): void {
    vrfList.replaceChildren();
    for (const vrf of snap.vrfs) {
      const card = el(doc, "div", { class: "card vrf", "data-vrf": vrf.name });
      card.append(el(doc, "h3", {}, vrf.name));
      card.append(el(doc, "p", {}, `rd ${vrf.rd} | color ${vrf.color}`));
      card.append(
        el(
          doc,
          "p",
          { class: "binding" },
          vrf.bound_algo === null ? "unbound" : `FlexAlgo ${vrf.bound_algo}`,
        ),
      );
      vrfList.append(card);
    }
  }

  function renderForm(snap: Snapshot): void {
    const known = new Set(
      Array.from(colorBox.querySelectorAll("input")).map((i) => i.value),
    );
    for (const color of Object.keys(snap.topology.affinity).sort()) {
      if (known.has(color)) continue;
      const label = el(doc, "label", {}, color);
      label.prepend(
        el(doc, "input", {
          type: "checkbox",
          name: "color",
          value: color,
        }),
      );
      colorBox.append(label);
    }
    const custom = snap.vrfs.find((v) => v.name === "CUSTOM");
    targetColor = custom ? custom.color : null;
    targetNote.textContent = custom
      ? `target: ${custom.name} (color ${custom.color})`
      : "target: –";

    const knownLinks = new Set(
      Array.from(delaySelect.querySelectorAll("option")).map((o) => o.value),
    );
    for (const link of undirectedLinks(snap.topology.links)) {
      if (knownLinks.has(link.id)) continue;
      delaySelect.append(el(doc, "option", { value: link.id }, link.id));
    }
  }

  // --- data loading ---------------------------------------------------------
  async function loadOverlays(vrfs: VrfInfo[]): Promise<OverlayState[]> {
    const overlays: OverlayState[] = [];
    for (const vrf of vrfs) {
      if (vrf.bound_algo === null || vrf.attachments.length === 0) continue;
      const ingress = Math.min(...vrf.attachments.map((a) => a.node));
      const remote = vrf.attachments.find((a) => a.node !== ingress);
      if (!remote) continue;
      try {
        const trace = await api.traceroute(
          ingress,
          vrf.name,
          probeAddress(remote.prefix),
        );
        overlays.push({
          vrf: vrf.name,
          algo: vrf.bound_algo,
          path: [ingress, ...trace.hops.map((h) => h.node)],
          ingressLabels: trace.hops[0]?.labels ?? [],
        });
      } catch {
        // A VRF without a forwardable probe simply has no overlay.
      }
    }
    return overlays;
  }

  async function refresh(): Promise<void> {
    try {
      const [topology, fads, vrfs] = await Promise.all([
        api.topology(),
        api.fads(),
        api.vrfs(),
      ]);
      const overlays = await loadOverlays(vrfs);
      snapshot = { topology, fads, vrfs, overlays };
      renderForm(snapshot);
      renderTopology(snapshot);
      renderFads(snapshot);
      renderVrfs(snapshot);
      setBanner(null);
    } catch (error) {
      const message = error instanceof Error ? error.message : String(error);
      setBanner(`API unreachable: ${message} — showing stale data`);
    }
  }

  // --- mutations ------------------------------------------------------------
  async function submitFad(): Promise<void> {
    if (pending || targetColor === null) return;
    const colors = Array.from(
      colorBox.querySelectorAll<HTMLInputElement>("input:checked"),
    ).map((input) => input.value);
    setPending(true);
    try {
      const outcome = await api.submitFad({
        metric: metricSelect.value,
        op: opSelect.value,
        colors,
        target_color: targetColor,
      });
      const verb = outcome.kind === "REUSED" ? "Reused" : "Created";
      setToast(`${verb} FlexAlgo ${outcome.algo}`, "ok");
      await refresh();
    } catch (error) {
      if (error instanceof ApiError) {
        setToast(`${error.code}: ${error.message}`, "error");
      } else {
        setToast(String(error), "error");
      }
    } finally {
      setPending(false);
    }
  }

  async function submitDelay(): Promise<void> {
    if (pending) return;
    setPending(true);
    try {
      const report = await api.setDelay(
        delaySelect.value,
        Number(delayInput.value),
      );
      delayReportBox.replaceChildren();
      delayReportBox.append(
        el(
          doc,
          "p",
          { class: "changed-algos" },
          report.changed_algos.length
            ? `recomputed: ${report.changed_algos.join(", ")}`
            : "no algorithms affected",
        ),
      );
      for (const [vrf, diff] of Object.entries(report.path_diffs)) {
        delayReportBox.append(
          el(
            doc,
            "p",
            { class: "path-diff", "data-vrf": vrf },
            `${vrf}: ${diff.old.join("-")} → ${diff.new.join("-")}`,
          ),
        );
      }
      await refresh();
    } catch (error) {
      if (error instanceof ApiError) {
        setToast(`${error.code}: ${error.message}`, "error");
      } else {
        setToast(String(error), "error");
      }
    } finally {
      setPending(false);
    }
  }

  submitButton.addEventListener("click", () => void submitFad());
  delayButton.addEventListener("click", () => void submitDelay());

  let timer: ReturnType<typeof setInterval> | null = null;
  if (pollMs > 0) {
    timer = setInterval(() => void refresh(), pollMs);
  }

  return {
    refresh,
    dispose(): void {
      if (disposed) return;
      disposed = true;
      if (timer !== null) {
        clearInterval(timer);
      }
    },
  };
}
