"""Command-line front end: JSON in, one JSON document out.

Every input flag takes inline JSON, ``@path`` to read a file, or ``-`` for
standard input. Exit status is 0 on success, 1 on a domain error (the error is
also written as JSON to standard error) and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence

from .euler import chi
from .modstruct import FgModule, Presentation, from_presentation
from .oracle import brute_closure, enumerate_universe, to_json as modules_to_json
from .ring import Ring, RingError, parse_ring
from .subcat import (
    closure_class,
    descriptor_from_json,
    from_spec_subset,
    generate,
    membership_witness,
    spec_subset_from_json,
    spec_subset_to_json,
    to_spec_subset,
)
from .witness import Certificate, NotInSubcategory, member_certificate, verify_certificate


class InputError(Exception):
    """Input that cannot be parsed into the expected objects."""


class DomainError(Exception):
    """Well-formed input with no valid answer (exit status 1)."""


def _read(value: str):
    if value == "-":
        text = sys.stdin.read()
    elif value.startswith("@"):
        try:
            with open(value[1:], encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(str(exc)) from exc
    else:
        text = value
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc


def _parse(what: str, fn, *args):
    """Run a parser, mapping structural errors to ``InputError``.

    Ring errors are domain errors even while parsing (mismatched rings,
    non-primes), so they pass through untouched.
    """
    try:
        return fn(*args)
    except RingError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError, IndexError) as exc:
        raise InputError(f"malformed {what}: {exc}") from exc


def _ring(args) -> Ring | None:
    return _parse("ring", parse_ring, args.ring) if args.ring else None


def _module(obj, ring):
    if not isinstance(obj, dict):
        raise InputError("a module must be a JSON object")
    return _parse("module", FgModule.from_json, obj, ring)


def _modules(obj, ring) -> list[FgModule]:
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list):
        raise InputError("expected a JSON list of modules")
    return [_module(o, ring) for o in obj]


def _single_module(obj, ring) -> FgModule:
    if isinstance(obj, list):
        if len(obj) != 1:
            raise InputError("expected exactly one module")
        obj = obj[0]
    return _module(obj, ring)


def _descriptor(obj, ring):
    if not isinstance(obj, dict):
        raise InputError("a descriptor must be a JSON object")
    return _parse("descriptor", descriptor_from_json, obj, ring)


# ---------------------------------------------------------------------------
# subcommands


def cmd_canon(args):
    obj = _read(args.presentation)
    if args.ring and isinstance(obj, dict) and "ring" not in obj:
        obj = {**obj, "ring": args.ring}
    P = _parse("presentation", Presentation.from_json, obj)
    return from_presentation(P).to_json()


def cmd_chi(args):
    ring = _ring(args)
    M = _single_module(_read(args.module), ring)
    support = None
    if args.support is not None:
        raw = _read(args.support)
        if not isinstance(raw, list):
            raise InputError("support must be a JSON list of primes")
        support = _parse("support", lambda xs: [M.ring.canonical(M.ring.parse(str(p))) for p in xs], raw)
    out = chi(M, support, strict=args.strict).to_json()
    return out


def cmd_generate(args):
    ring = _ring(args)
    mods = _modules(_read(args.modules), ring)
    return generate(mods, ring).to_json()


def cmd_member(args):
    ring = _ring(args)
    M = _single_module(_read(args.module), ring)
    d = _descriptor(_read(args.descriptor), ring or M.ring)
    out = {"member": d.member(M)}
    w = membership_witness(d, M)
    if w is not None:
        out["witness"] = w
    return out


def cmd_certify(args):
    ring = _ring(args)
    gens = _modules(_read(args.generators), ring)
    target = _single_module(_read(args.target), ring)
    return member_certificate(gens, target).to_json()


def cmd_verify(args):
    obj = _read(args.certificate)
    if not isinstance(obj, dict):
        raise InputError("a certificate must be a JSON object")
    cert = _parse("certificate", Certificate.from_json, obj)
    report = verify_certificate(cert)
    if not report.ok:
        # the report itself is the answer; the status flags the rejection
        raise DomainError(report.to_json())
    return report.to_json()


def cmd_classify(args):
    ring = _ring(args)
    d = _descriptor(_read(args.descriptor), ring)
    cls = closure_class(d)
    out = cls.to_json()
    if cls.thick:
        out["spec_subset"] = spec_subset_to_json(to_spec_subset(d), d.ring)
    return out


def cmd_spec_subset(args):
    ring = _ring(args) or parse_ring("Z")
    S = _parse("spec subset", spec_subset_from_json, _read(args.subset), ring)
    return from_spec_subset(S, ring).to_json()


def cmd_oracle_closure(args):
    ring = _ring(args)
    if ring is not None and str(ring) != "Z":
        raise DomainError("the oracle works over the integers only")
    gens = _modules(_read(args.generators), ring)
    primes = _parse("primes", lambda s: [int(p) for p in s.split(",") if p.strip()], args.primes)
    u = enumerate_universe(primes, args.max_length)
    return modules_to_json(brute_closure(gens, u))


COMMANDS = {
    "canon": cmd_canon,
    "chi": cmd_chi,
    "generate": cmd_generate,
    "member": cmd_member,
    "certify": cmd_certify,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "spec-subset": cmd_spec_subset,
    "oracle-closure": cmd_oracle_closure,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", help='ring for inputs without one: "Z", "Fp[x]:p" or "field:L"')
    common.add_argument("--pretty", action="store_true", help="indent the JSON output")

    parser = _Parser(prog="pidsubcat", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("canon", parents=[common], help="canonical form of a presented module")
    p.add_argument("-p", "--presentation", required=True)

    p = sub.add_parser("chi", parents=[common], help="rank and p-lengths of a module")
    p.add_argument("-m", "--module", required=True)
    p.add_argument("-s", "--support", help="JSON list of primes to keep")
    p.add_argument("--strict", action="store_true", help="fail on torsion outside the support")

    p = sub.add_parser("generate", parents=[common], help="subcategory generated by modules")
    p.add_argument("-m", "--modules", required=True)

    p = sub.add_parser("member", parents=[common], help="membership test")
    p.add_argument("-d", "--descriptor", required=True)
    p.add_argument("-m", "--module", required=True)

    p = sub.add_parser("certify", parents=[common], help="membership certificate")
    p.add_argument("-g", "--generators", required=True)
    p.add_argument("-t", "--target", required=True)

    p = sub.add_parser("verify", parents=[common], help="replay a certificate")
    p.add_argument("-c", "--certificate", default="-")

    p = sub.add_parser("classify", parents=[common], help="closure properties of a descriptor")
    p.add_argument("-d", "--descriptor", required=True)

    p = sub.add_parser("spec-subset", parents=[common], help="descriptor of a subset of Spec")
    p.add_argument("-s", "--subset", required=True)

    p = sub.add_parser("oracle-closure", parents=[common], help="brute-force closure in a finite universe")
    p.add_argument("-g", "--generators", required=True)
    p.add_argument("--primes", default="2,3", help="comma separated primes")
    p.add_argument("--max-length", type=int, default=3, help="bound on each p-length")
    return parser


def _dump(obj, pretty: bool) -> str:
    if pretty:
        return json.dumps(obj, indent=2)
    return json.dumps(obj, separators=(",", ":"))


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    pretty = False
    try:
        args = build_parser().parse_args(argv)
        pretty = args.pretty
        out = COMMANDS[args.command](args)
    except InputError as exc:
        print(_dump({"error": "malformed_input", "message": str(exc)}, pretty), file=stderr)
        return 2
    except DomainError as exc:
        payload = exc.args[0]
        if isinstance(payload, dict):
            print(_dump(payload, pretty), file=stdout)
            payload = payload.get("reason", "")
        print(_dump({"error": "domain", "message": str(payload)}, pretty), file=stderr)
        return 1
    except NotInSubcategory as exc:
        print(_dump({"error": "not_in_subcategory", "message": str(exc)}, pretty), file=stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        # RingError, SupportError, NotThickError, UniverseError, HomError, ...
        name = type(exc).__name__
        print(_dump({"error": name, "message": str(exc)}, pretty), file=stderr)
        return 1
    print(_dump(out, pretty), file=stdout)
    return 0


def main() -> None:
    sys.exit(run())
