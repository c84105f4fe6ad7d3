"""Regenerate tests/fixtures/fieldfacts.json.

The public LMFDB API is the intended source; when it cannot be reached the
same invariants (label, defining polynomial, h, R) are produced with PARI/GP
through ``cypari`` and stamped ``origin: "pari"``.  Labels follow the LMFDB
pattern ``3.r.|D|.k`` with ``k`` counting fields of equal discriminant in
order of their reduced polynomials.

    python scripts/make_fixtures.py [--max-disc 1500] [--out tests/fixtures/fieldfacts.json]
"""

import argparse
import json
from pathlib import Path

import cypari

pari = cypari.pari


def cubic_fields(max_disc: int, s: int) -> list[tuple[int, list[int]]]:
    sign = -1 if s else 1
    out = []
    for group in ("C3", "S3"):
        for pol in pari(f"nflist(\"{group}\", [1, {max_disc}], {s})"):
            red = pari.polredabs(pol)
            disc = int(pari.nfdisc(red))
            out.append((disc, [int(c) for c in pari.Vecrev(red)]))
    assert all((d < 0) == (sign < 0) for d, _ in out)
    return sorted(set((d, tuple(c)) for d, c in out), key=lambda t: (abs(t[0]), t[1]))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-disc", type=int, default=1500)
    ap.add_argument("--units-per-signature", type=int, default=10)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests/fixtures/fieldfacts.json"))
    args = ap.parse_args()
    pari.set_real_precision(60)
    entries: dict[str, list[dict]] = {}
    for s in (0, 1):
        r = 3 - 2 * s
        counters: dict[int, int] = {}
        for disc, coeffs in cubic_fields(args.max_disc, s):
            bnf = pari.bnfinit(pari.Pol(list(reversed(coeffs))), 1)
            assert int(pari.bnfcertify(bnf)) == 1
            counters[disc] = counters.get(disc, 0) + 1
            entries.setdefault(str(disc), []).append(
                {
                    "label": f"3.{r}.{abs(disc)}.{counters[disc]}",
                    "discriminant": disc,
                    "coeffs": list(coeffs),
                    "h": int(bnf.bnf_get_no()),
                    "R": float(bnf.bnf_get_reg()),
                    "origin": "pari",
                }
            )
    ordered = dict(sorted(entries.items(), key=lambda kv: (abs(int(kv[0])), int(kv[0]))))
    payload = {"schema": "primegeo.fieldfacts", "version": 1, "entries": ordered}
    Path(args.out).write_text(json.dumps(payload, indent=1) + "\n")
    print(f"wrote {sum(map(len, ordered.values()))} fields to {args.out}")
    units_out = Path(args.out).with_name("units.json")
    units_out.write_text(json.dumps(fundamental_units(ordered, args.units_per_signature), indent=1) + "\n")
    print(f"wrote fundamental units to {units_out}")


def fundamental_units(entries: dict, count: int) -> list[dict]:
    """PARI fundamental units of the ``count`` smallest fields per signature.

    Units are power-basis coordinates (low to high) as ``"num/den"`` strings.
    """
    out = []
    for sign in (-1, 1):
        picked = [e for es in entries.values() for e in es if (e["discriminant"] > 0) == (sign > 0)][:count]
        for e in picked:
            bnf = pari.bnfinit(pari.Pol(list(reversed(e["coeffs"]))), 1)
            fus = []
            for u in pari("(b) -> b.fu")(bnf):
                v = pari.Vecrev(pari.lift(u), 3)
                fus.append([str(c) for c in v])
            out.append({"label": e["label"], "discriminant": e["discriminant"], "coeffs": e["coeffs"], "units": fus})
    return out


if __name__ == "__main__":
    main()
