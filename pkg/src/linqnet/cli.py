"""
Command-line front end.

JSON goes to stdout (or ``--output``), diagnostics to stderr.  Exit codes:
0 success, 1 I/O or malformed input, 2 validation failure, 3 no single
effective Hamiltonian.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import elements
from .blochmessiah import (
    DegeneracyUnresolvedError,
    InvariantViolationError,
    factorize_g,
    factorize_g0,
)
from .core import (
    DEFAULT_TOL,
    Generator,
    InvalidMatrixError,
    NotQuasiUnitaryError,
    ScatteringMatrix,
    random_generator,
    validate_scattering,
)
from .fock import (
    BudgetExceededError,
    FockSpace,
    GuardBandError,
    heisenberg_residual,
    product_operator,
    scattering_operator,
    unitarity_residual,
)
from .hamiltonian import effective_hamiltonian
from .jsonio import FormatError, doc_to_matrix, dumps, loads, matrix_to_doc
from .logm import expm, hamiltonian_log

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_NO_HAMILTONIAN = 0, 1, 2, 3

DECOMPOSE_HINT = ("no single effective Hamiltonian generates this network; "
                  "decompose it into three Hamiltonian-generated factors instead "
                  "(linqnet decompose --variant g)")


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        self.code = code
        super().__init__(message)


def _read(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    return loads(text)


def _write(args, payload) -> None:
    text = dumps(payload)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise CLIError(f"cannot write {args.output}: {exc}", EXIT_IO) from exc


def _scattering(doc, tol: float, group: str = "G") -> ScatteringMatrix:
    M = doc_to_matrix(doc)
    try:
        return ScatteringMatrix(M, tol=tol, group=group)
    except NotQuasiUnitaryError as exc:
        raise CLIError(str(exc), EXIT_INVALID) from exc


def _generator(doc, tol: float) -> Generator:
    K = Generator(doc_to_matrix(doc), tol)
    if not K.is_valid:
        raise CLIError("input generator fails the Lie condition K G + G K^+ = 0", EXIT_INVALID)
    return K


def cmd_element(args):
    if args.kind == "random":
        K = random_generator(args.n, args.scale, rng=args.seed)
        S = ScatteringMatrix(expm(K), tol=1e-9)
        return matrix_to_doc(S.matrix, kind="random", seed=args.seed, scale=args.scale), EXIT_OK
    params = {k: getattr(args, k) for k in ("phi", "zeta", "theta") if getattr(args, k) is not None}
    if args.kind == "identity":
        params["n"] = args.n
    try:
        S = elements.ElementSpec(args.kind, params).build()
    except elements.ParameterDomainError as exc:
        raise CLIError(str(exc), EXIT_INVALID) from exc
    return matrix_to_doc(S.matrix, kind=args.kind, params=params), EXIT_OK


def cmd_validate(args):
    M = doc_to_matrix(_read(args.input))
    report = validate_scattering(M, args.tol, structured=args.variant == "g")
    if not report.passed:
        print(f"validation failed: {report.summary()}", file=sys.stderr)
    return report.to_dict(), EXIT_OK if report.passed else EXIT_INVALID


def _log(args):
    S = _scattering(_read(args.input), args.tol)
    result = hamiltonian_log(S, args.tol)
    if not result.found:
        diag = result.diagnostics
        if "trace" in diag:
            print(f"trace of S = {diag['trace'][0]:.12g}", file=sys.stderr)
        if "reason" in diag:
            print(diag["reason"], file=sys.stderr)
        print(DECOMPOSE_HINT, file=sys.stderr)
    return S, result


def cmd_log(args):
    _, result = _log(args)
    return result.to_dict(), EXIT_OK if result.found else EXIT_NO_HAMILTONIAN


def cmd_hamiltonian(args):
    if args.generator:
        K = _generator(_read(args.input), args.tol)
        extra = {}
    else:
        _, result = _log(args)
        if not result.found:
            return result.to_dict(), EXIT_NO_HAMILTONIAN
        K = result.generator
        extra = {"K": np.array(K.matrix), "branch_note": result.branch_note}
    H = effective_hamiltonian(K)
    return matrix_to_doc(H.matrix, hermitian=True,
                         hermiticity_residual=H.hermiticity_residual, **extra), EXIT_OK


def _factorization_doc(f) -> dict:
    doc = {
        "variant": f.variant,
        "n": f.K1.n,
        "factors": [matrix_to_doc(k.matrix) for k in f.factors],
        "D": np.asarray(f.D, dtype=float),
        "reconstruction_residual": f.reconstruction_residual,
        "certificates": f.certificates,
    }
    if f.variant == "g":
        doc["Q"] = np.asarray(f.Q, dtype=float)
        doc["resolution"] = f.resolution
    return doc


def cmd_decompose(args):
    group = "G" if args.variant == "g" else "G0"
    S = _scattering(_read(args.input), args.tol, group)
    try:
        f = factorize_g(S) if args.variant == "g" else factorize_g0(S)
    except (InvariantViolationError, DegeneracyUnresolvedError) as exc:
        raise CLIError(str(exc), EXIT_INVALID) from exc
    return _factorization_doc(f), EXIT_OK


def cmd_exp(args):
    doc = _read(args.input)
    if isinstance(doc, dict) and "factors" in doc:
        out = dict(doc)
        out["factors"] = [matrix_to_doc(expm(args.tau * doc_to_matrix(d))) for d in doc["factors"]]
        out["exponentiated"] = True
        return out, EXIT_OK
    return matrix_to_doc(expm(args.tau * doc_to_matrix(doc))), EXIT_OK


def cmd_compose(args):
    mats = []
    for path in args.inputs:
        doc = _read(path)
        if isinstance(doc, dict) and "factors" in doc:
            mats.extend(doc_to_matrix(d) for d in doc["factors"])
        else:
            mats.append(doc_to_matrix(doc))
    if len({m.shape for m in mats}) != 1:
        raise CLIError("mode count mismatch between inputs", EXIT_INVALID)
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    report = validate_scattering(out, args.tol, structured=False)
    if not report.passed:
        print(f"product is not quasi-unitary: {report.summary()}", file=sys.stderr)
    return matrix_to_doc(out, quasi_unitarity_residual=report.residuals.get("quasi_unitarity")), \
        EXIT_OK if report.passed else EXIT_INVALID


def cmd_fock_verify(args):
    doc = _read(args.input)
    try:
        if args.generator:
            K = _generator(doc, args.tol)
            S = expm(np.array(K.matrix))
            factors = [K]
            route = "generator"
        else:
            Sm = _scattering(doc, args.tol)
            S = Sm.matrix
            result = hamiltonian_log(Sm, args.tol)
            if result.found:
                factors, route = [result.generator], "single Hamiltonian"
            else:
                factors, route = list(factorize_g(Sm).factors), "three-factor product"
        space = FockSpace(len(S) // 2, args.cutoff)
        U = scattering_operator(factors[0], space) if len(factors) == 1 \
            else product_operator(factors, space)
        rep = heisenberg_residual(S, U, args.max_photons)
    except (BudgetExceededError, GuardBandError) as exc:
        raise CLIError(str(exc), EXIT_IO) from exc
    passed = rep.residual <= args.tolerance
    out = {
        "route": route,
        "cutoff": args.cutoff,
        "max_photons": args.max_photons,
        "tolerance": args.tolerance,
        "residuals": {
            "heisenberg": rep.residual,
            "adjoint_convention": rep.adjoint_residual,
            "unitarity": unitarity_residual(U, args.max_photons),
        },
        "passed": passed,
    }
    if not passed:
        print(f"Heisenberg residual {rep.residual:.3e} exceeds {args.tolerance:.1e}", file=sys.stderr)
    return out, EXIT_OK if passed else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linqnet", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def add(name, func, help_, inputs=True):
        sp = sub.add_parser(name, help=help_)
        if inputs:
            sp.add_argument("input", nargs="?", default="-", help="JSON file (default: stdin)")
        sp.add_argument("-o", "--output", help="write JSON here instead of stdout")
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL, help="validation tolerance")
        sp.set_defaults(func=func)
        return sp

    sp = add("element", cmd_element, "emit a catalogue element", inputs=False)
    sp.add_argument("kind", choices=list(elements.KINDS) + ["random"])
    sp.add_argument("--phi", type=float)
    sp.add_argument("--zeta", type=float)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--n", type=int, default=1, help="mode count (identity, random)")
    sp.add_argument("--scale", type=float, default=0.5, help="generator norm (random)")
    sp.add_argument("--seed", type=int, default=0, help="seed (random)")

    sp = add("validate", cmd_validate, "check quasi-unitarity and block structure")
    sp.add_argument("--variant", choices=["g", "g0"], default="g")

    add("log", cmd_log, "matrix logarithm in the quasi-unitary algebra")

    sp = add("hamiltonian", cmd_hamiltonian, "effective Hamiltonian coefficient matrix")
    sp.add_argument("--generator", action="store_true", help="input is a generator K, not S")

    sp = add("decompose", cmd_decompose, "three-factor decomposition")
    sp.add_argument("--variant", choices=["g", "g0"], default="g")

    sp = add("exp", cmd_exp, "matrix exponential of a generator or of every factor")
    sp.add_argument("--tau", type=float, default=1.0)

    sp = sub.add_parser("compose", help="multiply matrices in the given order")
    sp.add_argument("inputs", nargs="*", default=["-"])
    sp.add_argument("-o", "--output")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(func=cmd_compose)

    sp = add("fock-verify", cmd_fock_verify, "check the Heisenberg relation in truncated Fock space")
    sp.add_argument("--cutoff", type=int, default=8)
    sp.add_argument("--max-photons", type=int, default=3)
    sp.add_argument("--tolerance", type=float, default=1e-6)
    sp.add_argument("--generator", action="store_true", help="input is a generator K, not S")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, code = args.func(args)
        _write(args, payload)
        return code
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (FormatError, InvalidMatrixError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
