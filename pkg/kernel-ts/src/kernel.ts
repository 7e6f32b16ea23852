/**
 * A JavaScript execution kernel for the weave renderer.
 *
 * Speaks wire protocol v1: one JSON object per line, host requests on
 * stdin, replies on stdout, stderr free for diagnostics. Chunk code and
 * inline expressions run in one persistent non-strict `node:vm` context,
 * so `var` declarations and bare assignments carry across chunks the way
 * a session is supposed to.
 *
 * Inside chunks these helpers are global:
 *
 *     print(x)                stdout segment
 *     message(x), warn(x)     message / warning segments
 *     plot(...ys)             SVG polyline written to the figure dir
 *     table(header, ...rows)  structured table
 *
 * The completion value of a chunk (or of an inline expression) is
 * reported as its value; `undefined` stays silent.
 */

import { writeFileSync } from "node:fs";
import { join } from "node:path";
import { createInterface } from "node:readline";
import { pathToFileURL } from "node:url";
import { inspect } from "node:util";
import * as vm from "node:vm";

const PROTOCOL_VERSION = 1;
const LANGS = ["js"];
const PX_PER_UNIT = 96;
// scripts are compiled under this name; error lines are parsed back
// out of stacks as `cell:<line>`, 1-based within the chunk
const CELL_FILENAME = "cell";

type Reply = Record<string, unknown>;

interface ExecRequest {
  id: string;
  code: string;
  fig_width: number;
  fig_height: number;
  figure_stem: string;
}

interface EvalRequest {
  id: string;
  expr: string;
}

function send(reply: Reply): void {
  process.stdout.write(JSON.stringify(reply) + "\n");
}

/** Value as display text: strings verbatim, everything else inspected. */
export function display(value: unknown): string {
  return typeof value === "string" ? value : inspect(value);
}

// errors raised inside the vm context are from another realm, so
// duck-type on name/message/stack instead of instanceof Error
export function errorText(err: unknown): string {
  if (err !== null && typeof err === "object" && "message" in err) {
    const name = (err as { name?: unknown }).name;
    const message = String((err as { message: unknown }).message);
    return typeof name === "string" && name ? `${name}: ${message}` : message;
  }
  return String(err);
}

/** 1-based line within the cell, recovered from a stack trace. */
export function cellLine(err: unknown): number | undefined {
  const stack =
    err !== null && typeof err === "object" && "stack" in err
      ? String((err as { stack: unknown }).stack)
      : "";
  const hit = stack.match(/\bcell:(\d+)/);
  return hit ? Number(hit[1]) : undefined;
}

/** Same fixed chart layout as the builtin kernel: 96 px per unit, 8%
 * margins, values scaled to the data range. */
export function polylineSvg(
  ys: number[],
  figWidth: number,
  figHeight: number,
): string {
  const width = Math.round(figWidth * PX_PER_UNIT);
  const height = Math.round(figHeight * PX_PER_UNIT);
  const marginX = width * 0.08;
  const marginY = height * 0.08;
  const lo = Math.min(...ys);
  const span = Math.max(...ys) - lo || 1;
  const step = (width - 2 * marginX) / (ys.length - 1);
  const points = ys.map((y, k) => {
    const px = marginX + k * step;
    const py = height - marginY - ((y - lo) / span) * (height - 2 * marginY);
    return `${px.toFixed(2)},${py.toFixed(2)}`;
  });
  const dots = points
    .map((p) => {
      const [cx, cy] = p.split(",");
      return `<circle cx="${cx}" cy="${cy}" r="3" fill="#2c6e9b"/>`;
    })
    .join("");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}">` +
    `<rect width="${width}" height="${height}" fill="#ffffff"/>` +
    `<polyline points="${points.join(" ")}" fill="none" stroke="#2c6e9b" ` +
    `stroke-width="2"/>${dots}</svg>\n`
  );
}

/** One persistent JavaScript session plus its protocol plumbing. */
export class Session {
  private context: vm.Context;
  private figureDir = ".";
  // set for the duration of one exec; helpers refuse to run otherwise
  private exec: ExecRequest | null = null;
  private figureCount = 0;

  constructor() {
    this.context = vm.createContext({
      print: (x: unknown) => this.segment("stdout", x),
      message: (x: unknown) => this.segment("message", x),
      warn: (x: unknown) => this.segment("warning", x),
      plot: (...ys: unknown[]) => this.plot(ys),
      table: (header: unknown, ...rows: unknown[]) => this.table(header, rows),
    });
  }

  setFigureDir(dir: string): void {
    this.figureDir = dir;
  }

  private active(helper: string): ExecRequest {
    if (!this.exec) {
      throw new Error(`${helper}() only works inside a chunk`);
    }
    return this.exec;
  }

  private segment(stream: string, x: unknown): void {
    send({ type: "output", id: this.active("output").id, stream, text: display(x) });
  }

  private plot(ys: unknown[]): void {
    const exec = this.active("plot");
    const values = ys.map(Number);
    if (values.length < 2 || values.some((v) => !Number.isFinite(v))) {
      throw new TypeError("plot() wants at least two finite numbers");
    }
    this.figureCount += 1;
    const name = `${exec.figure_stem}-${this.figureCount}.svg`;
    const svg = polylineSvg(values, exec.fig_width, exec.fig_height);
    writeFileSync(join(this.figureDir, name), svg, "utf8");
    send({ type: "figure", id: exec.id, path: name });
  }

  private table(header: unknown, rows: unknown[]): void {
    const exec = this.active("table");
    if (!Array.isArray(header) || header.length === 0) {
      throw new TypeError("table() wants a header array first");
    }
    const head = header.map(display);
    const body = rows.map((row) => {
      if (!Array.isArray(row) || row.length !== head.length) {
        throw new TypeError(
          `table() rows must have ${head.length} cells like the header`,
        );
      }
      return row.map(display);
    });
    send({ type: "table", id: exec.id, header: head, rows: body });
  }

  runExec(msg: ExecRequest): void {
    this.exec = msg;
    this.figureCount = 0;
    try {
      const script = new vm.Script(msg.code, { filename: CELL_FILENAME });
      const value = script.runInContext(this.context);
      if (value !== undefined) {
        send({ type: "value", id: msg.id, text: display(value) });
      }
      send({ type: "done", id: msg.id, ok: true });
    } catch (err) {
      send({
        type: "output",
        id: msg.id,
        stream: "error",
        text: errorText(err),
        line: cellLine(err),
      });
      send({ type: "done", id: msg.id, ok: false });
    } finally {
      this.exec = null;
    }
  }

  runEval(msg: EvalRequest): void {
    try {
      const script = new vm.Script(msg.expr, { filename: CELL_FILENAME });
      const value = script.runInContext(this.context);
      send({ type: "eval_result", id: msg.id, ok: true, text: display(value) });
    } catch (err) {
      send({ type: "eval_result", id: msg.id, ok: false, error: errorText(err) });
    }
  }
}

export async function main(): Promise<void> {
  const session = new Session();
  for await (const line of createInterface({ input: process.stdin })) {
    let msg: Record<string, unknown>;
    try {
      msg = JSON.parse(line);
    } catch {
      continue; // not protocol traffic
    }
    if (msg === null || typeof msg !== "object") {
      continue;
    }
    switch (msg.type) {
      case "hello":
        if (msg.version !== PROTOCOL_VERSION) {
          process.stderr.write(
            `host speaks protocol ${String(msg.version)}, kernel speaks ${PROTOCOL_VERSION}\n`,
          );
        }
        if (typeof msg.figure_dir === "string") {
          session.setFigureDir(msg.figure_dir);
        }
        send({ type: "hello", version: PROTOCOL_VERSION, langs: LANGS });
        break;
      case "exec":
        session.runExec(msg as unknown as ExecRequest);
        break;
      case "eval":
        session.runEval(msg as unknown as EvalRequest);
        break;
      case "shutdown":
        process.exit(0);
        break;
      default:
        break; // unknown request types: ignored, like the host ignores ours
    }
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main();
}
