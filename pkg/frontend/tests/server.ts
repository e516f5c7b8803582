/** Spawn the annotation service for integration tests. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface RunningServer {
  baseUrl: string;
  dataRoot: string;
  stop(): Promise<void>;
}

async function waitForHealth(baseUrl: string, timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${baseUrl}/health`);
      if (resp.ok) return;
    } catch {
      // server not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error(`service did not come up at ${baseUrl}`);
}

export async function startServer(port: number): Promise<RunningServer> {
  const dataRoot = mkdtempSync(join(tmpdir(), "failvis-ui-test-"));
  const child: ChildProcess = spawn(
    "python3",
    ["-m", "failvis.service", "--data-root", dataRoot, "--port", String(port)],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  let stderr = "";
  child.stderr?.on("data", (chunk) => {
    stderr += String(chunk);
  });
  const baseUrl = `http://127.0.0.1:${port}`;
  try {
    await waitForHealth(baseUrl);
  } catch (err) {
    child.kill("SIGKILL");
    throw new Error(`${String(err)}\nserver stderr:\n${stderr}`);
  }
  return {
    baseUrl,
    dataRoot,
    stop: () =>
      new Promise((resolve) => {
        child.once("exit", () => resolve());
        child.kill("SIGTERM");
        setTimeout(() => {
          child.kill("SIGKILL");
          resolve();
        }, 3000).unref();
      }),
  };
}

/** Minimal 24-bit BMP writer so tests can fabricate frame media without
 * image libraries; the store accepts BMP frame directories. */
export function bmpBytes(width: number, height: number, shade: number): Buffer {
  const rowSize = Math.ceil((width * 3) / 4) * 4;
  const pixelBytes = rowSize * height;
  const fileSize = 54 + pixelBytes;
  const buffer = Buffer.alloc(fileSize);
  buffer.write("BM", 0, "ascii");
  buffer.writeUInt32LE(fileSize, 2);
  buffer.writeUInt32LE(54, 10); // pixel data offset
  buffer.writeUInt32LE(40, 14); // BITMAPINFOHEADER
  buffer.writeInt32LE(width, 18);
  buffer.writeInt32LE(height, 22);
  buffer.writeUInt16LE(1, 26); // planes
  buffer.writeUInt16LE(24, 28); // bits per pixel
  buffer.writeUInt32LE(pixelBytes, 34);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const offset = 54 + y * rowSize + x * 3;
      const value = (shade + x + y) % 256;
      buffer[offset] = value; // B
      buffer[offset + 1] = (value * 3) % 256; // G
      buffer[offset + 2] = (value * 7) % 256; // R
    }
  }
  return buffer;
}
