#!/usr/bin/env node
/**
 * figkit — render weakslit CSV artifacts to SVG.
 *
 *   figkit <paths|trajectories|scan|shift-scaling> --in FILE [FILE...] --out FILE
 *          [--window center,halfwidth,t_w] [--title TEXT]
 *   figkit all --manifest DIR --out-dir DIR
 */

import { mkdirSync, readFileSync, writeFileSync, existsSync } from "node:fs";
import { basename, join } from "node:path";
import { readCsv } from "./csv.js";
import { Kind, PathsOptions, render } from "./render.js";

const KINDS: Kind[] = ["paths", "trajectories", "scan", "shift-scaling"];

interface Args {
  inputs: string[];
  out: string;
  manifest: string;
  outDir: string;
  window?: [number, number, number];
  title?: string;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { inputs: [], out: "", manifest: "", outDir: "." };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    switch (a) {
      case "--in":
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
          args.inputs.push(argv[++i]);
        }
        break;
      case "--out":
        args.out = argv[++i];
        break;
      case "--manifest":
        args.manifest = argv[++i];
        break;
      case "--out-dir":
        args.outDir = argv[++i];
        break;
      case "--window": {
        const parts = argv[++i].split(",").map(Number);
        if (parts.length !== 3 || parts.some((v) => !Number.isFinite(v))) {
          throw new Error("--window expects center,halfwidth,t_w");
        }
        args.window = [parts[0], parts[1], parts[2]];
        break;
      }
      case "--title":
        args.title = argv[++i];
        break;
      default:
        throw new Error(`unknown argument ${a}`);
    }
  }
  return args;
}

function kindForFile(name: string): Kind | null {
  if (name.startsWith("bundle_")) return "paths";
  if (name.startsWith("traj_")) return "trajectories";
  if (name.startsWith("scan_")) return "scan";
  if (name === "gscale.csv") return "shift-scaling";
  return null;
}

function renderAll(manifestDir: string, outDir: string): string[] {
  const manifestPath = join(manifestDir, "run_manifest.json");
  if (!existsSync(manifestPath)) {
    throw new Error(`no run_manifest.json in ${manifestDir}`);
  }
  const manifest = JSON.parse(readFileSync(manifestPath, "utf8")) as {
    files: Record<string, string>;
  };
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const name of Object.keys(manifest.files).sort()) {
    const kind = kindForFile(name);
    if (!kind) continue;
    const table = readCsv(join(manifestDir, name));
    const svg = render(kind, [table], { title: basename(name, ".csv") });
    const target = join(outDir, basename(name, ".csv") + ".svg");
    writeFileSync(target, svg);
    written.push(target);
  }
  return written;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (!command) {
    console.error(`usage: figkit <${KINDS.join("|")}|all> ...`);
    return 1;
  }
  try {
    if (command === "all") {
      const args = parseArgs(rest);
      const written = renderAll(args.manifest, args.outDir);
      console.log(`${written.length} figures -> ${args.outDir}`);
      return 0;
    }
    if (!KINDS.includes(command as Kind)) {
      console.error(`unknown kind '${command}'; expected ${KINDS.join(", ")} or all`);
      return 1;
    }
    const args = parseArgs(rest);
    if (args.inputs.length === 0 || !args.out) {
      console.error("need --in FILE [FILE...] and --out FILE");
      return 1;
    }
    const tables = args.inputs.map(readCsv);
    const opts: PathsOptions = { window: args.window, title: args.title };
    writeFileSync(args.out, render(command as Kind, tables, opts));
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("figkit")) {
  process.exit(main(process.argv.slice(2)));
}
