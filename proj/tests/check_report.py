#!/usr/bin/env python3
"""Validates a report against the schema and the conventions manifest."""

import json
import sys

import jsonschema

report_path, schema_path, manifest_path = sys.argv[1:4]
report = json.load(open(report_path))
jsonschema.validate(report, json.load(open(schema_path)))
manifest = json.load(open(manifest_path))
if report["conventions_hash"] != manifest["hash"]:
    sys.exit(f"conventions hash {report['conventions_hash']} != manifest {manifest['hash']}")
if not report["passed"]:
    sys.exit("report did not pass")
print(f"{report_path}: valid, {len(report['records'])} records")
