/**
 * Node bindings for the lexbpe tokenizer toolkit.
 *
 * Every call delegates to the `lexbpe` CLI (configurable via the LEXBPE_CLI
 * environment variable, e.g. "python3 -m lexbpe"), so there is exactly one
 * implementation of the tokenization semantics. Batch methods stream one
 * input per line; single-item methods pass the payload as an argument and
 * therefore accept embedded newlines.
 */

import { spawnSync } from "node:child_process";
import { existsSync } from "node:fs";

const MAX_BUFFER = 256 * 1024 * 1024;

export interface EncodeRecord {
  ids: number[];
  surfaces: string[];
  offsets: [number, number][];
}

export interface VocabInfo {
  size: number;
  power_of_two: boolean;
  specials: number;
  added: number;
  merges: number;
}

function cliCommand(): string[] {
  const override = process.env.LEXBPE_CLI;
  if (override && override.trim().length > 0) {
    return override.trim().split(/\s+/);
  }
  return ["lexbpe"];
}

export function runCli(args: string[], input?: string): string {
  const [cmd, ...base] = cliCommand();
  const proc = spawnSync(cmd, [...base, ...args], {
    input,
    encoding: "utf-8",
    maxBuffer: MAX_BUFFER,
  });
  if (proc.error) {
    throw proc.error;
  }
  if (proc.status !== 0) {
    const detail = (proc.stderr ?? "").trim();
    throw new Error(`lexbpe exited with status ${proc.status}: ${detail}`);
  }
  return proc.stdout;
}

/** Version string of the underlying toolkit. */
export function coreVersion(): string {
  return runCli(["--version"]).trim();
}

/** Train a tokenizer through the CLI and return a handle to the result. */
export function train(configPath: string, corpusPath: string, outPath: string): BoundTokenizer {
  runCli(["train", "--config", configPath, "--corpus", corpusPath, "--out", outPath]);
  return BoundTokenizer.load(outPath);
}

export class BoundTokenizer {
  private constructor(
    readonly path: string,
    readonly info: VocabInfo,
  ) {}

  /** Validate and open a serialized tokenizer file. */
  static load(path: string): BoundTokenizer {
    if (!existsSync(path)) {
      throw new Error(`tokenizer file does not exist: ${path}`);
    }
    const info = JSON.parse(runCli(["inspect", path, "--json"])) as VocabInfo;
    return new BoundTokenizer(path, info);
  }

  /** Encode one text (newlines allowed) into token ids. */
  encode(text: string): number[] {
    return this.encodeFull(text).ids;
  }

  /** Encode one text and return ids, surfaces, and character offsets. */
  encodeFull(text: string): EncodeRecord {
    const out = runCli(["encode", "--model", this.path, "--json", text]);
    return JSON.parse(out) as EncodeRecord;
  }

  /** Encode many newline-free texts in a single CLI invocation. */
  encodeBatch(texts: string[]): number[][] {
    for (const text of texts) {
      if (text.includes("\n")) {
        throw new Error("encodeBatch inputs must be newline-free; use encode()");
      }
    }
    const out = runCli(["encode", "--model", this.path, "--json"], texts.join("\n") + "\n");
    return out
      .split("\n")
      .filter((line) => line.length > 0)
      .map((line) => (JSON.parse(line) as EncodeRecord).ids);
  }

  /** Decode token ids back to text. */
  decode(ids: number[], skipSpecials = false): string {
    const args = ["decode", "--model", this.path, "--json"];
    if (skipSpecials) {
      args.push("--skip-specials");
    }
    const out = runCli([...args, ...ids.map(String)]);
    return (JSON.parse(out) as { text: string }).text;
  }

  /** Decode many id sequences in a single CLI invocation. */
  decodeBatch(idsList: number[][], skipSpecials = false): string[] {
    const args = ["decode", "--model", this.path, "--json"];
    if (skipSpecials) {
      args.push("--skip-specials");
    }
    const input = idsList.map((ids) => ids.join(" ")).join("\n") + "\n";
    const out = runCli(args, input);
    return out
      .split("\n")
      .filter((line) => line.length > 0)
      .map((line) => (JSON.parse(line) as { text: string }).text);
  }

  /** Tokens-per-character ratio of this tokenizer over a corpus path. */
  tpc(corpusPath: string): number {
    const out = runCli([
      "eval-tpc",
      "--model",
      this.path,
      "--corpus",
      corpusPath,
      "--format",
      "csv",
    ]);
    const lines = out.split("\n");
    const header = lines.findIndex((line) => line.startsWith("# Tokens per character"));
    if (header < 0 || header + 2 >= lines.length) {
      throw new Error("unexpected eval-tpc output shape");
    }
    const cells = lines[header + 2].split(",");
    const value = Number.parseFloat(cells[cells.length - 1]);
    if (Number.isNaN(value)) {
      throw new Error(`could not parse TPC value from: ${lines[header + 2]}`);
    }
    return value;
  }

  /** Vocabulary size reported by the toolkit. */
  vocabSize(): number {
    return this.info.size;
  }
}
