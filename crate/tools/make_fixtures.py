#!/usr/bin/env python3
"""Generate the binary test fixtures: template decks, paper bundles, and
pre-rendered slide images.

Run from the repo root:  python3 tools/make_fixtures.py
Outputs land in crates/core/tests/fixtures/.
"""

import io
import json
import os
import zipfile

from PIL import Image, ImageDraw

ROOT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "fixtures")

NS = (
    'xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" '
    'xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships" '
    'xmlns:p="http://schemas.openxmlformats.org/presentationml/2006/main"'
)

XML_DECL = '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'

EMU_PER_PT = 12700


def pt(v):
    return v * EMU_PER_PT


def sp_placeholder(shape_id, name, ph_type, x, y, cx, cy, text, sz=2400, bold=False):
    b = ' b="1"' if bold else ""
    return f"""<p:sp>
<p:nvSpPr><p:cNvPr id="{shape_id}" name="{name}"/><p:cNvSpPr><a:spLocks noGrp="1"/></p:cNvSpPr><p:nvPr><p:ph type="{ph_type}"/></p:nvPr></p:nvSpPr>
<p:spPr><a:xfrm><a:off x="{x}" y="{y}"/><a:ext cx="{cx}" cy="{cy}"/></a:xfrm></p:spPr>
<p:txBody><a:bodyPr/><a:lstStyle/><a:p><a:pPr algn="l"/><a:r><a:rPr lang="en-US" sz="{sz}"{b}/><a:t>{text}</a:t></a:r></a:p></p:txBody>
</p:sp>"""


def sp_placeholder_noxfrm(shape_id, name, ph_type, text):
    return f"""<p:sp>
<p:nvSpPr><p:cNvPr id="{shape_id}" name="{name}"/><p:cNvSpPr><a:spLocks noGrp="1"/></p:cNvSpPr><p:nvPr><p:ph type="{ph_type}"/></p:nvPr></p:nvSpPr>
<p:spPr/>
<p:txBody><a:bodyPr/><a:lstStyle/><a:p><a:r><a:rPr lang="en-US"/><a:t>{text}</a:t></a:r></a:p></p:txBody>
</p:sp>"""


def sp_textbox(shape_id, name, x, y, cx, cy, text, paras=None):
    if paras is None:
        paras = [text]
    body = "".join(
        f'<a:p><a:r><a:rPr lang="en-US" sz="1400"/><a:t>{t}</a:t></a:r></a:p>' for t in paras
    )
    if not paras:
        body = "<a:p><a:endParaRPr lang=\"en-US\" sz=\"1400\"/></a:p>"
    return f"""<p:sp>
<p:nvSpPr><p:cNvPr id="{shape_id}" name="{name}"/><p:cNvSpPr txBox="1"/><p:nvPr/></p:nvSpPr>
<p:spPr><a:xfrm><a:off x="{x}" y="{y}"/><a:ext cx="{cx}" cy="{cy}"/></a:xfrm><a:prstGeom prst="rect"><a:avLst/></a:prstGeom></p:spPr>
<p:txBody><a:bodyPr/><a:lstStyle/>{body}</p:txBody>
</p:sp>"""


def pic(shape_id, name, rid, x, y, cx, cy):
    return f"""<p:pic>
<p:nvPicPr><p:cNvPr id="{shape_id}" name="{name}"/><p:cNvPicPr><a:picLocks noChangeAspect="1"/></p:cNvPicPr><p:nvPr/></p:nvPicPr>
<p:blipFill><a:blip r:embed="{rid}"/><a:stretch><a:fillRect/></a:stretch></p:blipFill>
<p:spPr><a:xfrm><a:off x="{x}" y="{y}"/><a:ext cx="{cx}" cy="{cy}"/></a:xfrm><a:prstGeom prst="rect"><a:avLst/></a:prstGeom></p:spPr>
</p:pic>"""


def table(shape_id, name, x, y, cx, cy):
    def tc(t):
        return f'<a:tc><a:txBody><a:bodyPr/><a:p><a:r><a:t>{t}</a:t></a:r></a:p></a:txBody><a:tcPr/></a:tc>'

    return f"""<p:graphicFrame>
<p:nvGraphicFramePr><p:cNvPr id="{shape_id}" name="{name}"/><p:cNvGraphicFramePr/><p:nvPr/></p:nvGraphicFramePr>
<p:xfrm><a:off x="{x}" y="{y}"/><a:ext cx="{cx}" cy="{cy}"/></p:xfrm>
<a:graphic><a:graphicData uri="http://schemas.openxmlformats.org/drawingml/2006/table">
<a:tbl><a:tblPr/><a:tblGrid><a:gridCol w="{cx // 2}"/><a:gridCol w="{cx // 2}"/></a:tblGrid>
<a:tr h="370840">{tc('Metric')}{tc('Value')}</a:tr>
<a:tr h="370840">{tc('Accuracy')}{tc('0.93')}</a:tr>
</a:tbl></a:graphicData></a:graphic>
</p:graphicFrame>"""


def group(shape_id, name, x, y, cx, cy, child_ids):
    children = "".join(
        sp_textbox(cid, f"Inner {cid}", x + i * 200000, y + i * 200000, cx // 2, cy // 2, f"Grouped text {cid}")
        for i, cid in enumerate(child_ids)
    )
    return f"""<p:grpSp>
<p:nvGrpSpPr><p:cNvPr id="{shape_id}" name="{name}"/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr>
<p:grpSpPr><a:xfrm><a:off x="{x}" y="{y}"/><a:ext cx="{cx}" cy="{cy}"/><a:chOff x="{x}" y="{y}"/><a:chExt cx="{cx}" cy="{cy}"/></a:xfrm></p:grpSpPr>
{children}
</p:grpSp>"""


def slide_xml(shapes):
    return f"""{XML_DECL}<p:sld {NS}>
<p:cSld><p:spTree>
<p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr>
<p:grpSpPr><a:xfrm><a:off x="0" y="0"/><a:ext cx="0" cy="0"/><a:chOff x="0" y="0"/><a:chExt cx="0" cy="0"/></a:xfrm></p:grpSpPr>
{chr(10).join(shapes)}
</p:spTree></p:cSld>
<p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr>
</p:sld>"""


def notes_xml(text):
    return f"""{XML_DECL}<p:notes {NS}>
<p:cSld><p:spTree>
<p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr/>
<p:sp><p:nvSpPr><p:cNvPr id="2" name="Notes Placeholder 1"/><p:cNvSpPr><a:spLocks noGrp="1"/></p:cNvSpPr><p:nvPr><p:ph type="body" idx="1"/></p:nvPr></p:nvSpPr><p:spPr/>
<p:txBody><a:bodyPr/><a:lstStyle/><a:p><a:r><a:t>{text}</a:t></a:r></a:p></p:txBody></p:sp>
</p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:notes>"""


THEME = f"""{XML_DECL}<a:theme xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" name="Fixture Theme">
<a:themeElements>
<a:clrScheme name="Fixture"><a:dk1><a:srgbClr val="1F2430"/></a:dk1><a:lt1><a:srgbClr val="FFFFFF"/></a:lt1><a:dk2><a:srgbClr val="2E3A4E"/></a:dk2><a:lt2><a:srgbClr val="EEF1F5"/></a:lt2><a:accent1><a:srgbClr val="3C6E9F"/></a:accent1><a:accent2><a:srgbClr val="C0504D"/></a:accent2><a:accent3><a:srgbClr val="9BBB59"/></a:accent3><a:accent4><a:srgbClr val="8064A2"/></a:accent4><a:accent5><a:srgbClr val="4BACC6"/></a:accent5><a:accent6><a:srgbClr val="F79646"/></a:accent6><a:hlink><a:srgbClr val="0000FF"/></a:hlink><a:folHlink><a:srgbClr val="800080"/></a:folHlink></a:clrScheme>
<a:fontScheme name="Fixture"><a:majorFont><a:latin typeface="Calibri Light"/><a:ea typeface=""/><a:cs typeface=""/></a:majorFont><a:minorFont><a:latin typeface="Calibri"/><a:ea typeface=""/><a:cs typeface=""/></a:minorFont></a:fontScheme>
<a:fmtScheme name="Fixture"><a:fillStyleLst><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:fillStyleLst><a:lnStyleLst><a:ln><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln><a:ln><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln><a:ln><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln></a:lnStyleLst><a:effectStyleLst><a:effectStyle><a:effectLst/></a:effectStyle><a:effectStyle><a:effectLst/></a:effectStyle><a:effectStyle><a:effectLst/></a:effectStyle></a:effectStyleLst><a:bgFillStyleLst><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:bgFillStyleLst></a:fmtScheme>
</a:themeElements>
</a:theme>"""

MASTER = f"""{XML_DECL}<p:sldMaster {NS}>
<p:cSld><p:spTree><p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr/></p:spTree></p:cSld>
<p:clrMap bg1="lt1" tx1="dk1" bg2="lt2" tx2="dk2" accent1="accent1" accent2="accent2" accent3="accent3" accent4="accent4" accent5="accent5" accent6="accent6" hlink="hlink" folHlink="folHlink"/>
<p:sldLayoutIdLst><p:sldLayoutId id="2147483649" r:id="rId1"/></p:sldLayoutIdLst>
</p:sldMaster>"""

LAYOUT = f"""{XML_DECL}<p:sldLayout {NS} type="blank">
<p:cSld><p:spTree><p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr/></p:spTree></p:cSld>
<p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr>
</p:sldLayout>"""


def rels(entries):
    body = "".join(
        f'<Relationship Id="{rid}" Type="{typ}" Target="{target}"/>' for rid, typ, target in entries
    )
    return (
        f'{XML_DECL}<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">'
        f"{body}</Relationships>"
    )


R = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"
CT_SLIDE = "application/vnd.openxmlformats-officedocument.presentationml.slide+xml"
CT_NOTES = "application/vnd.openxmlformats-officedocument.presentationml.notesSlide+xml"


def build_deck(path, slides, notes_for=None, media=None):
    """slides: list of slide XML strings. notes_for: {slide_index: text}.
    media: {slide_index: png_bytes} for slides whose XML references rId2."""
    notes_for = notes_for or {}
    media = media or {}
    n = len(slides)
    parts = {}
    parts["_rels/.rels"] = rels([("rId1", f"{R}/officeDocument", "ppt/presentation.xml")])
    sld_ids = "".join(
        f'<p:sldId id="{256 + i}" r:id="rId{2 + i}"/>' for i in range(n)
    )
    parts["ppt/presentation.xml"] = (
        f"{XML_DECL}<p:presentation {NS}>"
        f'<p:sldMasterIdLst><p:sldMasterId id="2147483648" r:id="rId1"/></p:sldMasterIdLst>'
        f"<p:sldIdLst>{sld_ids}</p:sldIdLst>"
        f'<p:sldSz cx="12192000" cy="6858000"/><p:notesSz cx="6858000" cy="9144000"/>'
        f"</p:presentation>"
    )
    pres_rels = [("rId1", f"{R}/slideMaster", "slideMasters/slideMaster1.xml")]
    for i in range(n):
        pres_rels.append((f"rId{2 + i}", f"{R}/slide", f"slides/slide{i + 1}.xml"))
    parts["ppt/_rels/presentation.xml.rels"] = rels(pres_rels)
    parts["ppt/slideMasters/slideMaster1.xml"] = MASTER
    parts["ppt/slideMasters/_rels/slideMaster1.xml.rels"] = rels(
        [("rId1", f"{R}/slideLayout", "../slideLayouts/slideLayout1.xml"),
         ("rId2", f"{R}/theme", "../theme/theme1.xml")]
    )
    parts["ppt/slideLayouts/slideLayout1.xml"] = LAYOUT
    parts["ppt/slideLayouts/_rels/slideLayout1.xml.rels"] = rels(
        [("rId1", f"{R}/slideMaster", "../slideMasters/slideMaster1.xml")]
    )
    parts["ppt/theme/theme1.xml"] = THEME

    overrides = [
        ("/ppt/presentation.xml", "application/vnd.openxmlformats-officedocument.presentationml.presentation.main+xml"),
        ("/ppt/slideMasters/slideMaster1.xml", "application/vnd.openxmlformats-officedocument.presentationml.slideMaster+xml"),
        ("/ppt/slideLayouts/slideLayout1.xml", "application/vnd.openxmlformats-officedocument.presentationml.slideLayout+xml"),
        ("/ppt/theme/theme1.xml", "application/vnd.openxmlformats-officedocument.theme+xml"),
    ]
    for i, xml in enumerate(slides):
        name = f"ppt/slides/slide{i + 1}.xml"
        parts[name] = xml
        slide_rels = [("rId1", f"{R}/slideLayout", "../slideLayouts/slideLayout1.xml")]
        if i in media:
            parts["ppt/media/image1.png"] = media[i]
            slide_rels.append(("rId2", f"{R}/image", "../media/image1.png"))
        if i in notes_for:
            notes_name = f"ppt/notesSlides/notesSlide{i + 1}.xml"
            parts[notes_name] = notes_xml(notes_for[i])
            parts[f"ppt/notesSlides/_rels/notesSlide{i + 1}.xml.rels"] = rels(
                [("rId1", f"{R}/slide", f"../slides/slide{i + 1}.xml")]
            )
            slide_rels.append((f"rId{len(slide_rels) + 1}", f"{R}/notesSlide",
                               f"../notesSlides/notesSlide{i + 1}.xml"))
            overrides.append((f"/{notes_name}", CT_NOTES))
        parts[f"ppt/slides/_rels/slide{i + 1}.xml.rels"] = rels(slide_rels)
        overrides.append((f"/{name}", CT_SLIDE))

    defaults = [
        ("rels", "application/vnd.openxmlformats-package.relationships+xml"),
        ("xml", "application/xml"),
        ("png", "image/png"),
    ]
    ct = f'{XML_DECL}<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
    for ext, t in defaults:
        ct += f'<Default Extension="{ext}" ContentType="{t}"/>'
    for part, t in overrides:
        ct += f'<Override PartName="{part}" ContentType="{t}"/>'
    ct += "</Types>"
    parts["[Content_Types].xml"] = ct

    os.makedirs(os.path.dirname(path), exist_ok=True)
    with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as z:
        for name in sorted(parts, key=lambda k: (k != "[Content_Types].xml", k)):
            data = parts[name]
            if isinstance(data, str):
                data = data.encode("utf-8")
            info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            z.writestr(info, data)
    print(f"wrote {path} ({n} slides)")


def png_bytes(size, color, label=None):
    img = Image.new("RGB", size, color)
    if label:
        draw = ImageDraw.Draw(img)
        draw.rectangle([4, 4, size[0] - 5, size[1] - 5], outline=(40, 40, 40))
        draw.text((10, 10), label, fill=(20, 20, 20))
    buf = io.BytesIO()
    img.save(buf, "PNG")
    return buf.getvalue()


def make_template_a(path, media_png):
    slides = [
        slide_xml([
            sp_placeholder(2, "Title 1", "ctrTitle", pt(60), pt(120), pt(840), pt(120),
                           "Presentation Title", sz=4400, bold=True),
            sp_placeholder(3, "Subtitle 2", "subTitle", pt(60), pt(250), pt(840), pt(60),
                           "Subtitle Placeholder", sz=2000),
            sp_textbox(4, "TextBox 3", pt(47), pt(324), pt(347), pt(96),
                       "Presenter: Presenter 1, Presenter 2, ..."),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(40), pt(30), pt(880), pt(70), "Section Header", sz=3200, bold=True),
            sp_placeholder(3, "Content 2", "body", pt(40), pt(120), pt(880), pt(380),
                           "First bullet point"),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(40), pt(30), pt(880), pt(70), "Visual Topic", sz=3200, bold=True),
            sp_placeholder(3, "Content 2", "body", pt(40), pt(120), pt(420), pt(380), "Supporting text"),
            pic(4, "Picture 3", "rId2", 6096000, 1825625, 4572000, 3429000),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(40), pt(30), pt(880), pt(70), "Numbers", sz=3200, bold=True),
            sp_placeholder(3, "Content 2", "body", pt(40), pt(120), pt(420), pt(380), "Findings"),
            table(4, "Table 3", 6096000, 1825625, 4572000, 2000000),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(120), pt(180), pt(720), pt(120), "Thank You", sz=4400, bold=True),
            sp_textbox(3, "TextBox 2", pt(120), pt(330), pt(720), pt(60),
                       "谢谢 — ありがとう — merci 🎉"),
            group(4, "Group 3", pt(120), pt(410), pt(300), pt(90), [5, 6]),
        ]),
    ]
    build_deck(path, slides, notes_for={1: "Existing notes for slide 2."}, media={2: media_png})


def make_template_b(path):
    slides = [
        slide_xml([
            sp_placeholder(2, "Title 1", "ctrTitle", pt(80), pt(150), pt(800), pt(110), "Big Opening", sz=4000, bold=True),
            sp_textbox(3, "TextBox 2", pt(80), pt(280), pt(500), pt(50), "A tagline"),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(50), pt(40), pt(860), pt(60), "Agenda", sz=3000),
            sp_placeholder_noxfrm(3, "Content 2", "body", "Inherited geometry body"),
            sp_textbox(4, "TextBox 3", pt(50), pt(460), pt(300), pt(40), "Footer note"),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(50), pt(40), pt(860), pt(60), "Two Columns", sz=3000),
            sp_textbox(3, "TextBox 2", pt(50), pt(120), pt(420), pt(360), "Left column"),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(50), pt(40), pt(860), pt(60), "Quote", sz=3000),
            sp_textbox(3, "TextBox 2", pt(50), pt(120), pt(860), pt(80), "", paras=[]),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(200), pt(220), pt(560), pt(100), "The End", sz=4000, bold=True),
        ]),
    ]
    build_deck(path, slides)


def make_template_c(path, media_png):
    slides = [
        slide_xml([
            sp_placeholder(2, "Title 1", "ctrTitle", pt(70), pt(140), pt(820), pt(100), "Workshop Deck", sz=3600, bold=True),
            sp_placeholder(3, "Subtitle 2", "subTitle", pt(70), pt(260), pt(820), pt(50), "Subtitle here", sz=1800),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(45), pt(35), pt(870), pt(65), "Overview", sz=3000),
            sp_placeholder(3, "Content 2", "body", pt(45), pt(115), pt(870), pt(390), "Outline of the talk"),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(45), pt(35), pt(870), pt(65), "Figure Slide", sz=3000),
            pic(3, "Picture 2", "rId2", pt(250), pt(120), pt(460), pt(340)),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(45), pt(35), pt(870), pt(65), "Data Slide", sz=3000),
            table(3, "Table 2", pt(100), pt(130), pt(700), pt(200)),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(45), pt(35), pt(870), pt(65), "Discussion", sz=3000),
            sp_placeholder(3, "Content 2", "body", pt(45), pt(115), pt(870), pt(390), "Points to discuss"),
        ]),
        slide_xml([
            sp_placeholder(2, "Title 1", "title", pt(180), pt(200), pt(600), pt(110), "Questions?", sz=4000, bold=True),
        ]),
    ]
    build_deck(path, slides, media={2: media_png})


def write_bundle(path, sections, assets):
    os.makedirs(os.path.join(path, "assets"), exist_ok=True)
    body = []
    for heading, text in sections:
        body.append(f"# {heading}\n{text}\n")
    with open(os.path.join(path, "paper.md"), "w") as f:
        f.write("\n".join(body))
    manifest = []
    colors = [(198, 222, 241), (241, 210, 198), (210, 241, 198), (230, 230, 210)]
    for i, (asset_id, kind, caption) in enumerate(assets):
        fname = f"{asset_id}.png"
        with open(os.path.join(path, "assets", fname), "wb") as f:
            f.write(png_bytes((320, 240), colors[i % len(colors)], asset_id))
        manifest.append({
            "asset_id": asset_id,
            "kind": kind,
            "file": fname,
            "caption": caption,
            "source_locator": f"page {i + 2}",
        })
    with open(os.path.join(path, "assets", "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2)
    print(f"wrote bundle {path} ({len(sections)} sections, {len(assets)} assets)")


def main():
    os.makedirs(ROOT, exist_ok=True)
    media = png_bytes((400, 300), (222, 222, 240), "template media")

    make_template_a(os.path.join(ROOT, "decks", "template_a.pptx"), media)
    make_template_b(os.path.join(ROOT, "decks", "template_b.pptx"))
    make_template_c(os.path.join(ROOT, "decks", "template_c.pptx"), media)

    write_bundle(
        os.path.join(ROOT, "bundles", "target"),
        [
            ("Introduction", "This paper studies automatic deck construction for long technical documents. The task demands selecting salient material and presenting it clearly."),
            ("Motivation", "Readers skim; presenters must compress. Manual deck building is slow and error-prone, motivating an automated assistant."),
            ("Background", "Prior systems convert documents to slides directly, with fixed templates and no notion of per-user style."),
            ("Method", "The proposed system separates content selection from visual realization and plans narration alongside each slide."),
            ("Experiments", "We compare against three baselines on a held-out corpus and report six complementary quality scores."),
            ("Conclusion", "Separating planning from realization yields clearer, better-grounded decks and opens the door to narrated video export."),
        ],
        [
            ("fig_1", "figure", "System overview diagram"),
            ("fig_2", "figure", "Architecture of the planning stage"),
            ("fig_3", "figure", "Qualitative comparison of generated slides"),
            ("tab_1", "table", "Main results across six quality scores"),
        ],
    )
    write_bundle(
        os.path.join(ROOT, "bundles", "ref_paper"),
        [
            ("Introduction", "A reference study on sequence models for transcription tasks."),
            ("Challenge", "Long inputs overwhelm fixed windows and degrade output quality."),
            ("Method", "A segment-recurrent encoder with cached context summaries."),
            ("Experiments", "Evaluation across three public corpora with strong gains."),
            ("Conclusion", "Caching context scales transcription to hour-long inputs."),
        ],
        [],
    )
    write_bundle(
        os.path.join(ROOT, "bundles", "ref_slides"),
        [
            ("Slide 1", "Transcribing Long Inputs\nJane Doe, example lab"),
            ("Slide 2", "Why transcription breaks at scale\nFixed windows truncate context"),
            ("Slide 3", "Background: sequence encoders and their limits"),
            ("Slide 4", "Method: segment recurrence with cached summaries"),
            ("Slide 5", "Method: training objective and schedule"),
            ("Slide 6", "Experiments: three corpora, consistent gains"),
            ("Slide 7", "Ablations: cache size matters most"),
            ("Slide 8", "Takeaways and future work"),
        ],
        [],
    )

    # Synthetic human/model ratings for the correlation analysis: model
    # scores track human means with mild disagreement.
    import random

    rng = random.Random(17)
    rows = ["case_id,rater_id,metric,score"]
    for case in range(1, 11):
        for metric in ["content_structure", "aesthetic_pref", "content", "aesthetic"]:
            base = rng.randint(2, 4)
            h1 = max(1, min(5, base + rng.choice([-1, 0, 0, 1])))
            h2 = max(1, min(5, base + rng.choice([-1, 0, 0, 1])))
            model = max(1, min(5, base + rng.choice([-1, 0, 0, 0, 1])))
            rows.append(f"case_{case},human_1,{metric},{h1}")
            rows.append(f"case_{case},human_2,{metric},{h2}")
            rows.append(f"case_{case},mllm,{metric},{model}")
    with open(os.path.join(ROOT, "ratings.csv"), "w") as f:
        f.write("\n".join(rows) + "\n")
    print("wrote ratings.csv")

    renders = os.path.join(ROOT, "renders")
    os.makedirs(os.path.join(renders, "three"), exist_ok=True)
    for i in range(3):
        with open(os.path.join(renders, "three", f"slide-{i}.png"), "wb") as f:
            f.write(png_bytes((320, 180), (240, 240, 240), f"slide {i}"))
    os.makedirs(os.path.join(renders, "gen"), exist_ok=True)
    for i in range(10):
        with open(os.path.join(renders, "gen", f"slide-{i}.png"), "wb") as f:
            f.write(png_bytes((320, 180), (225, 235, 245), f"gen {i}"))
    os.makedirs(os.path.join(renders, "template"), exist_ok=True)
    for i in range(5):
        with open(os.path.join(renders, "template", f"slide-{i}.png"), "wb") as f:
            f.write(png_bytes((320, 180), (245, 235, 225), f"tmpl {i}"))
    print("wrote render fixtures")


if __name__ == "__main__":
    main()
