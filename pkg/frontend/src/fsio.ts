import * as fs from "node:fs";
import * as path from "node:path";

/** Write via a temp file in the same directory, then rename into place. */
export function writeFileAtomic(filePath: string, data: Buffer | string) {
  const dir = path.dirname(filePath);
  const base = path.basename(filePath);
  const tmp = path.join(dir, `.${base}-${process.pid}-${Date.now()}.tmp`);
  fs.writeFileSync(tmp, data);
  fs.renameSync(tmp, filePath);
}
