#!/usr/bin/env node
/**
 * Entry point.
 *
 *   gym-bridge                          serve stdio (default)
 *   gym-bridge --tcp PORT               listen on 127.0.0.1:PORT (0 = ephemeral)
 *   gym-bridge --tcp 0 --port-file F    also write the bound port to F
 *
 * Serves the reference double-integrator environment. Hosting a different
 * environment means implementing GymEnvironment and passing its factory to
 * serveStdio / serveTcp.
 */

import { writeFileSync } from "node:fs";
import type { AddressInfo } from "node:net";
import { ReferenceEnv } from "./env.js";
import { serveStdio, serveTcp } from "./server.js";

interface Options {
  tcpPort: number | null;
  portFile: string | null;
}

function fail(message: string): never {
  process.stderr.write(`error: ${message}\n`);
  process.exit(2);
}

function parseArgs(argv: string[]): Options {
  const options: Options = { tcpPort: null, portFile: null };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]!;
    if (arg === "--tcp") {
      const raw = argv[++i];
      const port = raw === undefined ? NaN : Number(raw);
      if (!Number.isInteger(port) || port < 0 || port > 65535) {
        fail(`--tcp needs a port in [0, 65535], got ${raw ?? "nothing"}`);
      }
      options.tcpPort = port;
    } else if (arg === "--port-file") {
      const file = argv[++i];
      if (file === undefined) {
        fail("--port-file needs a path");
      }
      options.portFile = file;
    } else {
      fail(`unknown argument ${arg}`);
    }
  }
  if (options.portFile !== null && options.tcpPort === null) {
    fail("--port-file only makes sense with --tcp");
  }
  return options;
}

async function main(): Promise<void> {
  const options = parseArgs(process.argv.slice(2));
  const factory = () => new ReferenceEnv();
  if (options.tcpPort === null) {
    await serveStdio(factory);
    return;
  }
  const server = await serveTcp(factory, options.tcpPort);
  const bound = (server.address() as AddressInfo).port;
  if (options.portFile !== null) {
    writeFileSync(options.portFile, String(bound), "utf-8");
  }
  process.stderr.write(`gym-bridge listening on 127.0.0.1:${bound}\n`);
}

main().catch((err) => {
  process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
  process.exit(1);
});
