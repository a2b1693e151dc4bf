import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface CorpusRecord {
  id: string;
  labels: Record<string, string>;
  metronome: string;
}

export interface DistanceMatrix {
  ids: string[];
  values: number[][];
  tsv: string; // raw file bytes, for byte-level comparisons
}

export interface RunOptions {
  bin?: string; // CLI executable; default $VERSEALIGN_BIN or "versealign"
  schemePath?: string; // scoring scheme config file
  threads?: number;
}

export function runCli(args: string[], bin?: string): string {
  const exe = bin ?? process.env.VERSEALIGN_BIN ?? "versealign";
  try {
    return execFileSync(exe, args, { encoding: "utf8" });
  } catch (err) {
    const failure = err as { status?: number; stderr?: string; message: string };
    const detail = failure.stderr?.trim() || failure.message;
    throw new Error(
      `${exe} ${args.join(" ")} exited ${failure.status ?? "abnormally"}: ${detail}`
    );
  }
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "versealign-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function distanceFlags(opts?: RunOptions): string[] {
  const flags: string[] = [];
  if (opts?.schemePath) flags.push("--scheme", opts.schemePath);
  if (opts?.threads !== undefined) flags.push("--threads", String(opts.threads));
  return flags;
}

export function writeCorpusFile(records: CorpusRecord[], path: string): void {
  const lines = records.map((r) =>
    JSON.stringify({ id: r.id, labels: r.labels, metronome: r.metronome })
  );
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
}

export function readCorpusFile(path: string): CorpusRecord[] {
  return readFileSync(path, "utf8")
    .split("\n")
    .filter((line) => line.trim() !== "")
    .map((line) => {
      const obj = JSON.parse(line) as CorpusRecord;
      if (!obj.id || typeof obj.metronome !== "string") {
        throw new Error(`malformed corpus line: ${line}`);
      }
      return obj;
    });
}

export function parseMatrixTsv(text: string): DistanceMatrix {
  const rows = text.split("\n").filter((line) => line !== "");
  if (rows.length < 2) throw new Error("matrix file has no data rows");
  const header = rows[0].split("\t");
  if (header[0] !== "id") throw new Error(`bad matrix header: ${rows[0]}`);
  const ids = header.slice(1);
  const values = rows.slice(1).map((row, i) => {
    const cells = row.split("\t");
    if (cells[0] !== ids[i]) {
      throw new Error(`row ${i} is ${cells[0]}, expected ${ids[i]}`);
    }
    if (cells.length !== ids.length + 1) {
      throw new Error(`row ${cells[0]} has ${cells.length - 1} cells`);
    }
    return cells.slice(1).map(Number);
  });
  if (values.length !== ids.length) {
    throw new Error(`${ids.length} ids but ${values.length} rows`);
  }
  return { ids, values, tsv: text };
}

export function bound_generate_corpus(
  form: string,
  poems: number,
  seed = 0,
  lambda?: number,
  opts?: RunOptions
): CorpusRecord[] {
  return withTempDir((dir) => {
    const out = join(dir, "corpus.jsonl");
    const args = [
      "simulate",
      "--form", form,
      "--poems", String(poems),
      "--seed", String(seed),
      "--out", out,
    ];
    if (lambda !== undefined) args.push("--lambda", String(lambda));
    runCli(args, opts?.bin);
    return readCorpusFile(out);
  });
}

export function bound_distance_matrix(
  records: CorpusRecord[],
  opts?: RunOptions
): DistanceMatrix {
  return withTempDir((dir) => {
    const corpus = join(dir, "corpus.jsonl");
    const out = join(dir, "dist.tsv");
    writeCorpusFile(records, corpus);
    runCli(
      ["distmat", "--corpus", corpus, "--out", out, ...distanceFlags(opts)],
      opts?.bin
    );
    return parseMatrixTsv(readFileSync(out, "utf8"));
  });
}

export function bound_pair_distance(
  a: string,
  b: string,
  opts?: RunOptions
): number {
  const records: CorpusRecord[] = [
    { id: "a", labels: {}, metronome: a },
    { id: "b", labels: {}, metronome: b },
  ];
  return bound_distance_matrix(records, opts).values[0][1];
}
