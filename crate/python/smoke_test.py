#!/usr/bin/env python3
"""Smoke test for the _flatcollapse extension module.

Build the extension first, then run this script:

    cargo build -p flatcollapse-py --release
    python3 python/smoke_test.py
"""

import shutil
import sys
import sysconfig
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    built = next(
        (
            p
            for p in (
                ROOT / "target" / profile / "lib_flatcollapse.so"
                for profile in ("release", "debug")
            )
            if p.exists()
        ),
        None,
    )
    if built is None:
        sys.exit("extension not built; run: cargo build -p flatcollapse-py --release")
    dest_dir = built.parent / "pyext"
    dest_dir.mkdir(exist_ok=True)
    dest = dest_dir / ("_flatcollapse" + suffix)
    if not dest.exists() or built.stat().st_mtime > dest.stat().st_mtime:
        shutil.copy2(built, dest)
    sys.path.insert(0, str(dest_dir))
    import _flatcollapse

    return _flatcollapse


fc = load_module()

checks = 0


def check(name, cond):
    global checks
    assert cond, name
    checks += 1
    print(f"[smoke] {name}: PASS")


def fixture(name):
    return str(ROOT / "fixtures" / name)


kb = fc.Group.load(fixture("KB.json"))
kb.validate()
check("load and validate", kb.dim == 2 and kb.order == 2)

free, witness = kb.is_torsion_free()
check("torsion freeness", free and witness is None)

hex3 = fc.Group.load(fixture("HEX3.json"))
free, witness = hex3.is_torsion_free()
check("torsion witness", not free and witness["element_index"] >= 1)

seq = kb.i_sequence()
check("i-sequence", seq["entries"] == [1, 1] and seq["certified"])

e1 = [[1, 0]]
e2 = [[0, 1]]

smooth, _ = kb.is_smooth(e2)
check("smooth collapse", smooth)
smooth, wit = kb.is_smooth(e1)
check("singular collapse", not smooth and wit is not None)

leaf = kb.classify_leaf(e1, [0, "1/2"])
check(
    "exceptional leaf",
    leaf["class"] == {"principal": False, "index": 2} and leaf["volume_sq"] == "1/4",
)

locus = kb.singular_locus(e1)
check("singular locus", locus["complete"] and len(locus["strata"]) == 1)

quot, info = kb.collapse(e2)
quot.validate()
check(
    "collapsed circle",
    quot.dim == 1
    and quot.order == 1
    and info["holonomy_order"] == 1
    and info["lattice_index"] == 2,
)

hw = fc.Group.load(fixture("HW.json"))
tc = hw.theorem_c()
check("two step collapse", tc["applicable"] and tc["w1"]["basis"] == [["1", "0", "0"]])
tc = kb.theorem_c()
check("no two step collapse", not tc["applicable"])

t2 = fc.Group.load(fixture("T2.json"))
cl = t2.closure([-2, 0, 1], "1", "2", [[[1, 0], [0, 1]]])
check("irrational line closure", cl["dim"] == 2 and len(cl["basis"]) == 2)

rep = kb.gh_verify(e2, s_values=[1.0, 0.25], pair_count=16)
check(
    "metric collapse chain",
    rep["pass"]
    and rep["records"][0]["d_s"] == 0.5
    and rep["records"][1]["d_s"] == 0.125,
)

print(f"[smoke] all {checks} checks passed")
