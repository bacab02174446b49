"""Runs the CLI on every shipped config and validates its output against the schemas."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

qss, root = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = {name: json.loads((root / "docs" / f"{name}.schema.json").read_text())
           for name in ("config", "report", "transcript")}
for s in schemas.values():
    jsonschema.Draft202012Validator.check_schema(s)

with tempfile.TemporaryDirectory() as tmp:
    for cfg in sorted((root / "configs").glob("*.json")):
        jsonschema.validate(json.loads(cfg.read_text()), schemas["config"])
        report, transcript = pathlib.Path(tmp, "r.json"), pathlib.Path(tmp, "t.json")
        code = subprocess.run([qss, "run", "--config", str(cfg), "--trials", "3",
                               "--out", str(report), "--transcript-out", str(transcript)]).returncode
        if code not in (0, 1):
            sys.exit(f"{cfg.name}: exit {code}")
        r = json.loads(report.read_text())
        jsonschema.validate(r, schemas["report"])
        jsonschema.validate(r["config"], schemas["config"])
        jsonschema.validate(json.loads(transcript.read_text()), schemas["transcript"])
        print(f"{cfg.name}: ok")
