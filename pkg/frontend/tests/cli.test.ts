import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, expect, test } from "vitest";
import { readSymf } from "../src/symf";

const CLI = fileURLToPath(new URL("../dist/cli.js", import.meta.url));
const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "cli-test-"));
afterAll(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

function run(...args: string[]) {
  const r = spawnSync("node", [CLI, ...args], { encoding: "utf8" });
  return { status: r.status, stdout: r.stdout, stderr: r.stderr };
}

const ckpt = path.join(tmp, "model.json");
const logPath = path.join(tmp, "train.csv");
const TRAIN_ARGS = [
  "train",
  "--train-images", "8", "--heldout-images", "2",
  "--epochs", "1", "--batch-size", "4", "--seed", "3",
  "--out", ckpt, "--log", logPath, "--quiet",
];

test("train writes a checkpoint and a log", () => {
  const r = run(...TRAIN_ARGS);
  expect(r.stderr).toBe("");
  expect(r.status).toBe(0);
  const saved = JSON.parse(fs.readFileSync(ckpt, "utf8"));
  expect(saved.version).toBe(1);
  expect(saved.spec.trainImages).toBe(8);
  expect(saved.weights.length).toBe(16);
  const log = fs.readFileSync(logPath, "utf8").trim().split("\n");
  expect(log[0]).toBe("epoch,mse,mean_papr_linear,psnr_db");
  expect(log.length).toBe(2);
  expect(log[1].startsWith("1,")).toBe(true);
});

test("train without --quiet reports per-epoch progress", () => {
  const r = run(
    "train", "--train-images", "4", "--heldout-images", "1",
    "--epochs", "1", "--batch-size", "4",
    "--out", path.join(tmp, "loud.json"),
  );
  expect(r.status).toBe(0);
  expect(r.stdout).toMatch(/epoch 1\/1 mse=/);
  expect(r.stdout).toMatch(/saved checkpoint/);
});

test("export-latents writes a decodable symbol file", () => {
  const out = path.join(tmp, "latents.symf");
  const r = run(
    "export-latents", "--model", ckpt, "--out", out,
    "--images", "3", "--seed", "5", "--quiet",
  );
  expect(r.stderr).toBe("");
  expect(r.status).toBe(0);
  const batch = readSymf(out);
  expect(batch.n).toBe(64);
  expect(batch.frameCount).toBe(24); // 8 frames per image
});

test("export-latents is deterministic", () => {
  const a = path.join(tmp, "a.symf");
  const b = path.join(tmp, "b.symf");
  expect(run("export-latents", "--model", ckpt, "--out", a, "--images", "2", "--quiet").status).toBe(0);
  expect(run("export-latents", "--model", ckpt, "--out", b, "--images", "2", "--quiet").status).toBe(0);
  expect(fs.readFileSync(a).equals(fs.readFileSync(b))).toBe(true);
});

test("evaluate prints a psnr grid to stdout", () => {
  const r = run(
    "evaluate", "--model", ckpt, "--snr", "5,15",
    "--trials", "2", "--images", "4",
  );
  expect(r.stderr).toBe("");
  expect(r.status).toBe(0);
  const lines = r.stdout.trim().split("\n");
  expect(lines[0]).toBe("snr_db,psnr_db");
  expect(lines.length).toBe(3);
  expect(lines[1].startsWith("5,")).toBe(true);
  expect(lines[2].startsWith("15,")).toBe(true);
  for (const line of lines.slice(1)) {
    expect(Number.isFinite(Number(line.split(",")[1]))).toBe(true);
  }
});

test("evaluate honors limiter flags and --out", () => {
  const out = path.join(tmp, "grid.csv");
  const r = run(
    "evaluate", "--model", ckpt, "--snr", "10", "--trials", "1",
    "--images", "2", "--technique", "softclip", "--rho", "1.4",
    "--out", out,
  );
  expect(r.status).toBe(0);
  expect(fs.readFileSync(out, "utf8").startsWith("snr_db,psnr_db\n10,")).toBe(true);
});

test("evaluate accepts an infinite snr point", () => {
  const r = run(
    "evaluate", "--model", ckpt, "--snr", "inf", "--trials", "1", "--images", "2",
  );
  expect(r.status).toBe(0);
  expect(r.stdout.trim().split("\n")[1].startsWith("inf,")).toBe(true);
});

test("usage errors exit 2 with an error line", () => {
  const cases: { args: string[]; message: RegExp }[] = [
    { args: ["bogus"], message: /unknown command 'bogus'/ },
    { args: ["train"], message: /requires --out/ },
    { args: ["train", "--out", path.join(tmp, "x.json"), "--dataset", "mnist"], message: /unknown dataset 'mnist'/ },
    { args: ["train", "--out", path.join(tmp, "x.json"), "--epochs", "1.5"], message: /--epochs must be an integer/ },
    { args: ["train", "--out", path.join(tmp, "x.json"), "--softclip-gamma", "1e-9"], message: /requires --softclip-rho/ },
    { args: ["train", "--no-such-flag"], message: /no-such-flag/ },
    { args: ["export-latents", "--out", path.join(tmp, "x.symf")], message: /requires --model/ },
    { args: ["evaluate", "--model", ckpt, "--technique", "hardline"], message: /unknown technique 'hardline' \(expected one of: clip, none, softclip\)/ },
  ];
  for (const c of cases) {
    const r = run(...c.args);
    expect(r.status).toBe(2);
    expect(r.stderr).toMatch(/^error: /);
    expect(r.stderr).toMatch(c.message);
  }
});

test("a missing checkpoint fails cleanly, not with a stack trace", () => {
  const r = run("evaluate", "--model", path.join(tmp, "ghost.json"), "--snr", "5");
  expect(r.status).toBe(1);
  expect(r.stderr).toMatch(/^error: /);
  expect(r.stderr).not.toMatch(/at /);
});
