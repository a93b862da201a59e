// End-to-end equivalence: a border sequence entered through the UI code
// paths (screen clicks -> controller -> HTTP) must yield a posterior map
// pixel-identical to the same sequence applied through the CLI, and the
// plan preview's crossing flag must flip once the carpet is committed.
//
// Requires python3 with the backend package installed (the repo's normal
// dev setup); the test spawns a real teach server on a random port.

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, test } from "vitest";

import { TeachApi } from "../src/api.js";
import { makeCamera, worldToScreen } from "../src/camera.js";
import { TeachController } from "../src/controller.js";
import { MapInfo } from "../src/types.js";

const PYTHON = process.env.PYTHON ?? "python3";
const PORT = 18700 + Math.floor(Math.random() * 900);
const BASE = `http://127.0.0.1:${PORT}`;

// same teaching sequence the backend demo assets carry
const WINDOW_CHAIN: [number, number][] = [
  [1.2125, 0.8125], [1.1725, 1.7625], [1.2125, 2.7125],
];
const WINDOW_SEED: [number, number] = [0.5125, 1.7625];
const CARPET_CHAIN: [number, number][] = [
  [2.6125, 1.0125], [4.6125, 1.0125], [4.6125, 2.2625], [2.6125, 2.2625],
];
const CARPET_SEED: [number, number] = [3.6125, 1.6375];
const NAV_START: [number, number] = [5.5125, 1.6375];
const NAV_GOAL: [number, number] = [1.9125, 1.6375];

let workDir: string;
let server: ChildProcess | null = null;

function run(args: string[]): void {
  const result = spawnSync(PYTHON, args, { encoding: "utf-8" });
  if (result.status !== 0) {
    throw new Error(`${PYTHON} ${args.join(" ")} failed:\n${result.stderr}`);
  }
}

async function waitForHealth(): Promise<void> {
  const deadline = Date.now() + 20000;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/healthz`);
      if (resp.ok) {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("teach server did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "border-ui-"));
  run(["-m", "border_forge.demo", "--out", join(workDir, "assets")]);
  server = spawn(
    PYTHON,
    ["-m", "border_forge", "serve", "--map", join(workDir, "assets", "lab.yaml"),
     "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForHealth();
}, 60000);

afterAll(() => {
  server?.kill();
});

/** Click a world point through the full screen->world conversion chain. */
async function clickWorld(
  controller: TeachController,
  map: MapInfo,
  world: [number, number],
): Promise<void> {
  const cam = makeCamera(5.25, 37.5, -12.25); // arbitrary view; conversion must not care
  const screen = worldToScreen(cam, map, { x: world[0], y: world[1] });
  const ok = await controller.handleCanvasClick(cam, screen);
  if (!ok) {
    throw new Error(`click rejected: ${controller.lastError}`);
  }
}

describe("UI / engine equivalence", () => {
  test("border sequence via UI equals CLI apply, pixel for pixel", async () => {
    const api = new TeachApi(BASE);
    const controller = new TeachController(api);
    await controller.start();
    const map = controller.state!.map;

    controller.tool = "add-point";
    for (const p of WINDOW_CHAIN) {
      await clickWorld(controller, map, p);
    }
    await controller.setClosed(false);
    await controller.setDelta(1.0);
    controller.tool = "set-seed";
    await clickWorld(controller, map, WINDOW_SEED);
    expect(await controller.commitAndRefresh()).toBe(true);

    controller.tool = "add-point";
    for (const p of CARPET_CHAIN) {
      await clickWorld(controller, map, p);
    }
    await controller.setClosed(true);
    controller.tool = "set-seed";
    await clickWorld(controller, map, CARPET_SEED);
    expect(await controller.commitAndRefresh()).toBe(true);
    expect(controller.state!.applied).toBe(2);

    const exported = await controller.exportScript();
    writeFileSync(join(workDir, "ui_session.json"), exported);

    run(["-m", "border_forge", "apply",
         "--map", join(workDir, "assets", "lab.yaml"),
         "--script", join(workDir, "ui_session.json"),
         "--out", join(workDir, "via_ui")]);
    run(["-m", "border_forge", "apply",
         "--map", join(workDir, "assets", "lab.yaml"),
         "--script", join(workDir, "assets", "teaching.json"),
         "--out", join(workDir, "via_cli")]);

    const uiBytes = readFileSync(join(workDir, "via_ui", "posterior.pgm"));
    const cliBytes = readFileSync(join(workDir, "via_cli", "posterior.pgm"));
    expect(uiBytes.equals(cliBytes)).toBe(true);
  }, 60000);

  test("plan preview crossing flag flips after carpet commit", async () => {
    const api = new TeachApi(BASE);
    const controller = new TeachController(api);
    await controller.start();
    const map = controller.state!.map;

    controller.tool = "add-point";
    for (const p of CARPET_CHAIN) {
      await clickWorld(controller, map, p);
    }
    await controller.setClosed(true);
    controller.tool = "set-seed";
    await clickWorld(controller, map, CARPET_SEED);

    controller.tool = "plan-preview";
    await clickWorld(controller, map, NAV_START);
    await clickWorld(controller, map, NAV_GOAL);

    const sid = controller.state!.id;
    const before = await api.fetchRender(
      sid, controller.state!.revision,
      controller.plan.start!, controller.plan.goal!);
    expect(before.planFound).toBe(true);
    expect(before.planCrosses).toBe(true);

    expect(await controller.commitAndRefresh()).toBe(true);
    const after = await api.fetchRender(
      sid, controller.state!.revision,
      controller.plan.start!, controller.plan.goal!);
    expect(after.planFound).toBe(true);
    expect(after.planCrosses).toBe(false);
  }, 60000);
});
