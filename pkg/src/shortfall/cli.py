"""Command-line client for the risk service.

Subcommands map one-to-one onto service endpoints; by default the service
app is mounted in-process (no network), while --server points the same
client at a running instance.  Failures print a single machine-parseable
line ``ERROR <code>: <detail>`` on stderr and exit 2 for input problems or
3 for numeric/feasibility conditions.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

from .reports import MODES, format_number


class _Failure(Exception):
    def __init__(self, code: str, detail: str, exit_code: int = 2):
        super().__init__(f"{code}: {detail}")
        self.code = code
        self.detail = detail
        self.exit_code = exit_code


def _post(server, path: str, payload: dict) -> dict:
    """POST one request, either to a remote service or to the app mounted
    in-process (the default; no network involved)."""
    if server:
        try:
            resp = httpx.post(server.rstrip("/") + path, json=payload, timeout=300.0)
        except httpx.HTTPError as exc:
            raise _Failure("ServiceUnreachable", str(exc)) from exc
        return _handle(resp)
    from .service import app

    async def _run():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://shortfall.internal", timeout=300.0
        ) as client:
            return await client.post(path, json=payload)

    return _handle(asyncio.run(_run()))


def _handle(resp: httpx.Response) -> dict:
    if resp.status_code >= 400:
        try:
            err = resp.json()["error"]
            code, detail = err["code"], err["detail"]
            exit_code = int(err.get("exit_code", 2))
        except (KeyError, TypeError, ValueError):
            raise _Failure("ServiceError", f"HTTP {resp.status_code}") from None
        raise _Failure(code, detail, exit_code)
    return resp.json()


def _read_text(path) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _Failure("BadInput", f"cannot read {path}: {exc}") from exc


def _read_json(path):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _Failure("ParseError", f"{path}: {exc}") from exc


def _write_out(text: str, out) -> None:
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise _Failure("BadInput", f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _bool(flag: bool) -> str:
    return "true" if flag else "false"


def _cmd_compute(args) -> None:
    payload = {
        "csv": _read_text(args.input),
        "mode": args.mode,
        "window": args.window,
        "smooth": args.smooth,
        "profile": _read_json(args.profile),
    }
    if args.atoms is not None:
        payload["atoms"] = args.atoms
    data = _post(args.server, "/compute", payload)
    _write_out(data["csv"], args.out)


def _cmd_check_ssd(args) -> None:
    payload = {
        "x_csv": _read_text(args.x),
        "z_csv": _read_text(args.z),
        "mode": args.mode,
        "tol": args.tol,
    }
    data = _post(args.server, "/check-ssd", payload)
    print(f"dominates: {_bool(data['dominates'])}, risk: {format_number(data['risk'])}")


def _cmd_classify_profile(args) -> None:
    data = _post(args.server, "/classify-profile", {"profile": _read_json(args.profile)})
    line = f"class: {data['class']}, homogeneous: {_bool(data['homogeneous'])}"
    if data.get("p_star") is not None:
        line += f", p_star: {format_number(data['p_star'])}"
    print(line)


def _cmd_optimize(args) -> None:
    payload = {
        "market": _read_json(args.market),
        "request": _read_json(args.request),
    }
    if args.atoms is not None:
        payload["atoms"] = args.atoms
    data = _post(args.server, "/optimize", payload)
    print(f"problem: {data['problem']}, value: {format_number(data['value'])}")
    print("payoff: " + " ".join(format_number(v) for v in data["payoff"]))


def _cmd_serve(args) -> None:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shortfall",
        description="Adjusted expected-shortfall risk reports, dominance checks, "
        "profile classification, and market optimization.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; omitted = run the engine in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("compute", help="rolling risk report from a dated CSV series")
    pc.add_argument("--input", required=True, help="CSV file with header date,value")
    pc.add_argument("--mode", default="losses", choices=MODES)
    pc.add_argument("--window", type=int, required=True, help="trailing window length (>= 2)")
    pc.add_argument("--smooth", type=int, default=0, help="trailing-mean span, 0 = off")
    pc.add_argument("--profile", required=True, help="risk-profile JSON file")
    pc.add_argument("--out", default=None, help="output CSV path (stdout when omitted)")
    pc.add_argument("--atoms", type=int, default=None, help="Gaussian discretization count")

    ps = sub.add_parser("check-ssd", help="second-order dominance check of X against Z")
    ps.add_argument("--x", required=True, help="CSV file for the candidate series X")
    ps.add_argument("--z", required=True, help="CSV file for the benchmark series Z")
    ps.add_argument("--mode", default="losses", choices=MODES)
    ps.add_argument("--tol", type=float, default=1e-12, help="dominance decision tolerance")

    pp = sub.add_parser("classify-profile", help="profile class and homogeneity report")
    pp.add_argument("--profile", required=True, help="risk-profile JSON file")

    po = sub.add_parser("optimize", help="closed-form market optimization")
    po.add_argument("--market", required=True, help="market JSON file")
    po.add_argument("--request", required=True, help="solver request JSON file")
    po.add_argument("--atoms", type=int, default=None, help="Gaussian discretization count")

    pv = sub.add_parser("serve", help="run the HTTP service")
    pv.add_argument("--host", default="127.0.0.1")
    pv.add_argument("--port", type=int, default=8000)
    return parser


_HANDLERS = {
    "compute": _cmd_compute,
    "check-ssd": _cmd_check_ssd,
    "classify-profile": _cmd_classify_profile,
    "optimize": _cmd_optimize,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "serve":
            _cmd_serve(args)
        else:
            _HANDLERS[args.command](args)
        return 0
    except _Failure as failure:
        print(f"ERROR {failure.code}: {failure.detail}", file=sys.stderr)
        return failure.exit_code


if __name__ == "__main__":
    sys.exit(main())
