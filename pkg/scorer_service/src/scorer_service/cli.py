"""Service entry point: stdio or HTTP transport around one backend."""

from __future__ import annotations

import argparse
import sys

from .backend import load_backend
from .service import ScorerService
from .wire import WireError, WireResponse, parse_request, serialize_response


def serve_stdio(service: ScorerService) -> int:
    """One request per line on stdin, one response per line on stdout;
    strictly one request in flight."""
    out = sys.stdout
    for line in sys.stdin:
        if not line.strip():
            continue
        try:
            response = service.handle(parse_request(line))
        except WireError as exc:
            response = WireResponse("", (), str(exc))
        out.write(serialize_response(response) + "\n")
        out.flush()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scorer-service",
        description="Reference scorer/refiner for the line-delimited JSON scorer protocol.",
    )
    parser.add_argument("--transport", choices=("stdio", "http"), default="stdio")
    parser.add_argument("--port", type=int, default=8010, help="HTTP port")
    parser.add_argument("--host", default="127.0.0.1", help="HTTP bind address")
    parser.add_argument(
        "--backend",
        default="ngram",
        help="ngram | module:<pkg.mod>:<factory> (factory gets order and training path)",
    )
    parser.add_argument("--order", type=int, default=2, help="n-gram order")
    parser.add_argument("--train", default=None, help="training corpus, one sentence per line")
    parser.add_argument("--max-candidates", type=int, default=8, help="server-side candidate cap")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        backend = load_backend(args.backend, args.order, args.train)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    service = ScorerService(backend, max_candidates=args.max_candidates)
    if args.transport == "stdio":
        return serve_stdio(service)
    import uvicorn

    from .http_app import build_app

    uvicorn.run(build_app(service), host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
