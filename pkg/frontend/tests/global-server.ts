// Boots the real Python game service once for the whole test run, on a free
// port with a throwaway catalog and database. Tests read the base url via
// inject("baseUrl").

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, mkdirSync, writeFileSync, rmSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import type { TestProject } from "vitest/node";

declare module "vitest" {
  export interface ProvidedContext {
    baseUrl: string;
  }
}

// img ids use letters only so year-leak scans cannot false-positive on them
const FIXTURE_YEARS = [1930, 1933, 1941, 1944, 1952, 1957, 1963, 1968, 1977, 1986, 1992, 1999];

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = net.createServer();
    server.on("error", reject);
    server.listen(0, "127.0.0.1", () => {
      const port = (server.address() as net.AddressInfo).port;
      server.close(() => resolve(port));
    });
  });
}

function writeFixture(dir: string, port: number): string {
  const ids = FIXTURE_YEARS.map((_, i) =>
    `pic-${String.fromCharCode(97 + Math.floor(i / 26))}${String.fromCharCode(97 + (i % 26))}`,
  );
  const rows = FIXTURE_YEARS.map(
    (year, i) =>
      `${ids[i]},${year},${year}-06-15,0,https://images.example/${ids[i]}.jpg,Fixture ${ids[i]}`,
  );
  const meta = join(dir, "meta.csv");
  writeFileSync(meta, "img_id,gt_year,date_taken,date_granularity,url,title\n" + rows.join("\n") + "\n");
  const imageDir = join(dir, "images");
  mkdirSync(imageDir);
  const config = join(dir, "config.json");
  writeFileSync(config, JSON.stringify({
    host: "127.0.0.1",
    port,
    storage_url: join(dir, "game.db"),
    catalog_path: meta,
    image_dir: imageDir,
    allow_partial_years: true,
  }));
  return config;
}

async function waitForReady(baseUrl: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 25_000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`game service exited early with code ${child.exitCode}`);
    }
    try {
      const response = await fetch(`${baseUrl}/healthz`);
      if (response.status === 200) return;
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("game service did not become ready in time");
}

export default async function setup(project: TestProject): Promise<() => Promise<void>> {
  const dir = mkdtempSync(join(tmpdir(), "photoyear-ui-"));
  const port = await freePort();
  const configPath = writeFixture(dir, port);
  const child = spawn("python3", ["-m", "photoyear.cli", "serve", "--config", configPath], {
    stdio: ["ignore", "ignore", "pipe"],
  });
  let stderr = "";
  child.stderr?.on("data", (chunk) => { stderr += String(chunk); });

  const baseUrl = `http://127.0.0.1:${port}`;
  try {
    await waitForReady(baseUrl, child);
  } catch (err) {
    child.kill("SIGKILL");
    throw new Error(`${err}\nservice stderr:\n${stderr}`);
  }
  project.provide("baseUrl", baseUrl);

  return async () => {
    child.kill("SIGTERM");
    await new Promise((resolve) => {
      child.once("exit", resolve);
      setTimeout(() => {
        child.kill("SIGKILL");
        resolve(null);
      }, 5_000);
    });
    rmSync(dir, { recursive: true, force: true });
  };
}
