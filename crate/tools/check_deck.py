#!/usr/bin/env python3
"""Sanity-check a .pptx with the stdlib only: every XML part must be
well-formed, every relationship target must exist, the presentation's slide
list must resolve, and content-type overrides must point at real parts.

Usage: python3 tools/check_deck.py <deck.pptx>
"""

import posixpath
import sys
import xml.etree.ElementTree as ET
import zipfile

R_NS = "{http://schemas.openxmlformats.org/package/2006/relationships}"
CT_NS = "{http://schemas.openxmlformats.org/package/2006/content-types}"
P_NS = "{http://schemas.openxmlformats.org/presentationml/2006/main}"
REL_ATTR = "{http://schemas.openxmlformats.org/officeDocument/2006/relationships}id"


def resolve(base, target):
    if target.startswith("/"):
        return target[1:]
    return posixpath.normpath(posixpath.join(posixpath.dirname(base), target))


def main(path):
    problems = []
    z = zipfile.ZipFile(path)
    names = set(z.namelist())

    for name in sorted(names):
        if name.endswith(".xml") or name.endswith(".rels"):
            try:
                ET.fromstring(z.read(name))
            except ET.ParseError as e:
                problems.append(f"{name}: not well-formed: {e}")

    rels_of = {}
    for name in sorted(names):
        if not name.endswith(".rels"):
            continue
        source = name.replace("_rels/", "").removesuffix(".rels")
        if source == "":
            source = "/"
        root = ET.fromstring(z.read(name))
        rels = {}
        for rel in root.findall(f"{R_NS}Relationship"):
            rid, target = rel.get("Id"), rel.get("Target")
            rels[rid] = target
            if rel.get("TargetMode") == "External":
                continue
            resolved = resolve(source if source != "/" else "", target)
            if resolved not in names:
                problems.append(f"{name}: {rid} -> {resolved} missing from package")
        rels_of[source] = rels

    ct = ET.fromstring(z.read("[Content_Types].xml"))
    for override in ct.findall(f"{CT_NS}Override"):
        part = override.get("PartName").lstrip("/")
        if part not in names:
            problems.append(f"[Content_Types].xml: override for missing part {part}")

    pres = ET.fromstring(z.read("ppt/presentation.xml"))
    pres_rels = rels_of.get("ppt/presentation.xml", {})
    slide_count = 0
    for sld in pres.iter(f"{P_NS}sldId"):
        rid = sld.get(REL_ATTR)
        target = pres_rels.get(rid)
        if target is None:
            problems.append(f"presentation.xml: sldId references unknown {rid}")
            continue
        resolved = resolve("ppt/presentation.xml", target)
        if resolved not in names:
            problems.append(f"presentation.xml: slide part {resolved} missing")
        slide_count += 1

    if problems:
        print(f"{path}: {len(problems)} problem(s)")
        for p in problems:
            print(f"  - {p}")
        return 1
    print(f"{path}: OK ({slide_count} slides, {len(names)} parts)")
    return 0


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    sys.exit(main(sys.argv[1]))
