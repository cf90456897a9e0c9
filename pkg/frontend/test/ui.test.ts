/** Headless end-to-end test: the full UI driven against a real served
 * simulator instance.  Requires the Python package to be installed
 * (`pip install -e .` in the repository root).
 */

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App, createApp, layoutNodes, probeAddress } from "../src/app.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let app: App;
let root: HTMLElement;

const nodeFetch = fetch.bind(globalThis);

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 30_000;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const resp = await nodeFetch(`${BASE}/topology`);
      if (resp.ok) return;
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`server never became ready: ${lastError}`);
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "flexsim.cli", "serve", "--port", String(PORT), "--host", "127.0.0.1"],
    { stdio: "ignore" },
  );
  await waitForServer();
  root = document.createElement("div");
  root.id = "app";
  document.body.append(root);
  // Polling disabled: the test drives refreshes explicitly.
  app = createApp(root, new ApiClient(BASE, nodeFetch), { pollMs: 0 });
  await app.refresh();
});

afterAll(() => {
  app?.dispose();
  server?.kill();
});

function overlay(vrf: string): SVGElement | null {
  return root.querySelector(`.overlay[data-vrf="${vrf}"]`);
}

function clickColor(color: string): void {
  for (const input of root.querySelectorAll<HTMLInputElement>(
    "#fad-colors input",
  )) {
    input.checked = input.value === color;
  }
}

async function submitFad(
  metric: string,
  op: string,
  color: string,
): Promise<void> {
  (root.querySelector("#fad-metric") as HTMLSelectElement).value = metric;
  (root.querySelector("#fad-op") as HTMLSelectElement).value = op;
  clickColor(color);
  (root.querySelector("#fad-submit") as HTMLButtonElement).click();
  // The click handler runs async; wait until the pending flag clears.
  const deadline = Date.now() + 15_000;
  while (Date.now() < deadline) {
    const button = root.querySelector("#fad-submit") as HTMLButtonElement;
    const toast = root.querySelector("#toast") as HTMLElement;
    if (!button.hasAttribute("disabled") && toast.textContent !== "") {
      return;
    }
    await new Promise((resolve) => setTimeout(resolve, 50));
  }
  throw new Error("FAD submission never completed");
}

describe("layout helpers", () => {
  it("positions nodes deterministically regardless of id order", () => {
    const a = layoutNodes([3, 1, 4, 2]);
    const b = layoutNodes([1, 2, 3, 4]);
    expect([...a.entries()]).toEqual([...b.entries()]);
  });

  it("derives the probe host from an attachment prefix", () => {
    expect(probeAddress("20.30.4.0/24")).toBe("20.30.4.4");
  });
});

describe("initial load", () => {
  it("renders four FAD cards from the scenario", () => {
    const cards = root.querySelectorAll("#fads .card");
    expect([...cards].map((c) => c.getAttribute("data-algo"))).toEqual([
      "128",
      "129",
      "130",
      "131",
    ]);
  });

  it("renders the four routers and five links with badges", () => {
    expect(root.querySelectorAll("#topology .node")).toHaveLength(4);
    expect(root.querySelectorAll("#topology .link")).toHaveLength(5);
    const badge = root.querySelector('.link-badge[data-link="2-4"]');
    expect(badge?.textContent).toContain("igp 1");
    expect(badge?.textContent).toContain("red");
  });

  it("shows CUSTOM as unbound with no overlay", () => {
    const custom = root.querySelector('#vrfs .card[data-vrf="CUSTOM"]');
    expect(custom?.querySelector(".binding")?.textContent).toBe("unbound");
    expect(overlay("CUSTOM")).toBeNull();
  });

  it("fixes the form target to the CUSTOM VRF", () => {
    expect(root.querySelector("#fad-target")?.textContent).toBe(
      "target: CUSTOM (color 50)",
    );
    // No FlexAlgo ID input exists anywhere in the form.
    expect(root.querySelector("#fad-form input[type=number]")).toBeNull();
  });
});

describe("path requests", () => {
  let firstOverlay: string;

  it("reuses FlexAlgo 128 for (igp, exclude-any, blue)", async () => {
    await submitFad("igp", "exclude-any", "blue");
    expect(root.querySelector("#toast")?.textContent).toBe(
      "Reused FlexAlgo 128",
    );
    const badge = overlay("CUSTOM");
    expect(badge?.getAttribute("data-algo")).toBe("128");
    firstOverlay = `${badge?.getAttribute("data-algo")}:${badge?.getAttribute("data-labels")}`;
    expect(
      root
        .querySelector('#vrfs .card[data-vrf="CUSTOM"] .binding')
        ?.textContent,
    ).toBe("FlexAlgo 128");
  });

  it("creates FlexAlgo 132 for (te-metric, include-all, red)", async () => {
    await submitFad("te-metric", "include-all", "red");
    expect(root.querySelector("#toast")?.textContent).toBe(
      "Created FlexAlgo 132",
    );
    const badge = overlay("CUSTOM");
    expect(badge?.getAttribute("data-algo")).toBe("132");
    const secondOverlay = `${badge?.getAttribute("data-algo")}:${badge?.getAttribute("data-labels")}`;
    expect(secondOverlay).not.toBe(firstOverlay);
    // The transport label moved from algo 128's SID to algo 132's.
    expect(badge?.getAttribute("data-labels")).toBe("20054,24006");
  });

  it("reuses FlexAlgo 132 on a duplicate submission", async () => {
    await submitFad("te-metric", "include-all", "red");
    expect(root.querySelector("#toast")?.textContent).toBe(
      "Reused FlexAlgo 132",
    );
  });
});

describe("delay events", () => {
  it("reports recomputed algorithms and the BRONZE path move", async () => {
    (root.querySelector("#delay-link") as HTMLSelectElement).value = "2-4";
    (root.querySelector("#delay-us") as HTMLInputElement).value = "10";
    (root.querySelector("#delay-submit") as HTMLButtonElement).click();
    const deadline = Date.now() + 15_000;
    while (
      Date.now() < deadline &&
      !root.querySelector("#delay-report .changed-algos")
    ) {
      await new Promise((resolve) => setTimeout(resolve, 50));
    }
    expect(
      root.querySelector("#delay-report .changed-algos")?.textContent,
    ).toBe("recomputed: 130");
    expect(
      root.querySelector('#delay-report .path-diff[data-vrf="BRONZE"]')
        ?.textContent,
    ).toBe("BRONZE: 1-3-4 → 1-2-4");
  });
});
