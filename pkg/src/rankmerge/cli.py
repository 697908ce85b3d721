"""Command-line entry point tying together ingest, combine, metrics,
resilience and records.

Exit codes are a stable scripting contract: 0 success, 1 usage error,
2 data error (parse failures, conflicts, missing records, corruption).
"""

from __future__ import annotations

import argparse
import datetime as dt
import io
import os
import sys
import zipfile
from pathlib import Path

from . import archive, ingest, metrics, records, resilience
from .combine import (
    DEFAULT_N_REF,
    CombineConfig,
    CrawlResult,
    FlagSet,
    HealthFilter,
    Method,
    build_list,
    load_crawl_csv,
)
from .errors import EmptyInputError, NotFoundError, RankmergeError
from .psl import PublicSuffixRules, default_rules
from .snapshots import Provider

OK = 0
USAGE_ERROR = 1
DATA_ERROR = 2

ARCHIVE_ENV = "RANKMERGE_ARCHIVE"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _parse_date(token: str) -> dt.date:
    try:
        return dt.date.fromisoformat(token)
    except ValueError as exc:
        raise SystemExit(_usage(f"bad date {token!r}: {exc}"))


def _usage(message: str) -> int:
    print(f"rankmerge: error: {message}", file=sys.stderr)
    return USAGE_ERROR


def _parse_window(token: str) -> tuple[dt.date, dt.date]:
    if ".." in token:
        start_s, _, end_s = token.partition("..")
        return _parse_date(start_s), _parse_date(end_s)
    day = _parse_date(token)
    return day, day


def _parse_providers(token: str) -> frozenset[Provider]:
    try:
        return frozenset(Provider(part.strip().lower()) for part in token.split(","))
    except ValueError:
        valid = ",".join(p.value for p in Provider)
        raise SystemExit(_usage(f"unknown provider in {token!r} (valid: {valid})"))


def _load_rules(args: argparse.Namespace) -> PublicSuffixRules:
    if args.psl:
        return PublicSuffixRules.from_file(args.psl)
    return default_rules()


def _archive_root(args: argparse.Namespace) -> Path:
    if args.archive:
        return Path(args.archive)
    return Path(os.environ.get(ARCHIVE_ENV, "archive"))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_source(source: str) -> bytes:
    """Read a local file or fetch a URL; transparently unwrap zip payloads."""
    if source.startswith(("http://", "https://")):
        from urllib.request import urlopen

        with urlopen(source) as response:  # noqa: S310 (explicit user-supplied URL)
            data = response.read()
    else:
        path = Path(source)
        if not path.exists():
            raise NotFoundError(f"no such file: {source}")
        data = path.read_bytes()
    if data[:4] == b"PK\x03\x04":
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            data = zf.read(zf.namelist()[0])
    return data


def _load_ranking_names(token: str, store: records.RecordStore) -> list[str]:
    """A ranking given as an archive/record id or a raw file.

    Files may be "rank,domain" lines or one domain per line; '#' lines
    are comments.
    """
    path = Path(token)
    if path.exists():
        text = path.read_text(encoding="utf-8")
    elif store.exists(token):
        text = records.serve_record(store, token, "list").decode("utf-8")
    else:
        raise NotFoundError(f"{token!r} is neither a file nor a stored record id")
    names = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.lower().startswith("rank,"):
            continue
        names.append(line.split(",")[1] if "," in line else line)
    return names


# -- ingest -------------------------------------------------------------


def _cmd_ingest(args: argparse.Namespace) -> int:
    rules = _load_rules(args)
    provider = Provider(args.provider.lower())
    date = _parse_date(args.date)
    data = _read_source(args.source)
    if provider in (Provider.ALEXA, Provider.UMBRELLA):
        snapshot, report = ingest.parse_alexa_umbrella_csv(data, provider, date, rules)
    elif provider is Provider.MAJESTIC:
        snapshot, report = ingest.parse_majestic_csv(data, date, rules)
    else:
        snapshot, report = ingest.parse_quantcast(data, date, rules)
    store = archive.ArchiveStore(_archive_root(args), rules)
    store.put(snapshot, overwrite=args.overwrite)
    print(report.summary())
    return OK


# -- combine ------------------------------------------------------------


def _parse_input_truncation(token: str) -> int | dict[Provider, int]:
    if "=" not in token:
        return int(token)
    cuts: dict[Provider, int] = {}
    for part in token.split(","):
        provider_s, _, n = part.partition("=")
        cuts[Provider(provider_s.strip().lower())] = int(n)
    return cuts


def _build_config(args: argparse.Namespace) -> tuple[
    CombineConfig, FlagSet | None, FlagSet | None, dict[str, CrawlResult] | None
]:
    window = _parse_window(args.days)
    health = None
    crawl = None
    if args.crawl:
        statuses = (
            frozenset(int(s) for s in args.health_status.split(","))
            if args.health_status
            else frozenset({200})
        )
        health = HealthFilter(
            require_reachable=True,
            statuses=statuses,
            min_body_bytes=args.health_min_bytes,
            missing_policy=args.health_missing,
        )
        crawl = load_crawl_csv(Path(args.crawl).read_bytes())
    benign = None
    if args.benign_exclude:
        path = Path(args.benign_exclude)
        benign = FlagSet.from_bytes(path.read_bytes(), label=path.stem)
    popular = None
    if args.popular_intersect:
        path = Path(args.popular_intersect)
        popular = FlagSet.from_bytes(path.read_bytes(), label=path.stem)
    config = CombineConfig(
        providers=_parse_providers(args.providers),
        window_start=window[0],
        window_end=window[1],
        method=Method(args.method),
        n_ref=args.nref,
        input_truncation=(
            _parse_input_truncation(args.input_truncate) if args.input_truncate else None
        ),
        umbrella_pld_mode=args.umbrella_pld,
        min_providers=args.min_providers,
        min_days=args.min_days,
        tld_include=frozenset(args.tld_include.split(",")) if args.tld_include else None,
        tld_exclude=frozenset(args.tld_exclude.split(",")) if args.tld_exclude else None,
        pld_dedupe_across_tlds=args.pld_dedupe,
        subdomain_pattern=args.subdomain,
        health_filter=health,
        benign_exclude=benign.reference if benign else None,
        popular_intersect=popular.reference if popular else None,
        output_truncation=args.output_truncate,
    )
    return config, benign, popular, crawl


def _cmd_combine(args: argparse.Namespace) -> int:
    rules = _load_rules(args)
    root = _archive_root(args)
    store = archive.ArchiveStore(root, rules)
    config, benign, popular, crawl = _build_config(args)
    index = store.index()
    snapshots = []
    missing = []
    for provider in sorted(config.providers, key=lambda p: p.value):
        for date in config.window_dates():
            if (provider, date) in index:
                snapshots.append(store.get(provider, date))
            else:
                missing.append(f"{provider.value}/{date.isoformat()}")
    if missing:
        print(f"missing inputs ({len(missing)}): {', '.join(missing)}", file=sys.stderr)
    combined = build_list(
        snapshots, config, crawl=crawl, benign=benign, popular=popular
    )
    record_store = records.RecordStore(root)
    manifest = record_store.put(
        config,
        combined.input_digests,
        combined.to_list_csv().encode("utf-8"),
        combined.to_extended_csv().encode("utf-8"),
    )
    if args.out:
        Path(args.out).write_bytes(records.serve_record(record_store, manifest.list_id, "list"))
    print(manifest.list_id)
    return OK


# -- metrics ------------------------------------------------------------


def _cmd_metrics(args: argparse.Namespace) -> int:
    rules = _load_rules(args)
    root = _archive_root(args)
    record_store = records.RecordStore(root)

    if args.metric == "rbo":
        names_a = _load_ranking_names(args.a, record_store)
        names_b = _load_ranking_names(args.b, record_store)
        params = metrics.RboParams(p=args.p, k=args.k)
        value = metrics.rbo(names_a, names_b, params)
        _emit(f"rbo\n{value!r}\n", args.out)
        return OK

    if args.metric == "stability":
        store = archive.ArchiveStore(root, rules)
        provider = Provider(args.provider.lower())
        window = _parse_window(args.days)
        index = store.index()
        dated = []
        day = window[0]
        while day <= window[1]:
            if (provider, day) in index:
                dated.append((day, store.get(provider, day)))
            day += dt.timedelta(days=1)
        if len(dated) < 2:
            raise EmptyInputError("need at least two archived days for a stability series")
        report = metrics.stability_series(dated)
        lines = ["date,intersection\n"]
        lines += [f"{d.isoformat()},{frac!r}\n" for d, frac in report.series]
        _emit("".join(lines), args.out)
        return OK

    if args.metric == "tlds":
        names = _load_ranking_names(args.list, record_store)
        from .domains import parse_domain
        from .snapshots import ProviderSnapshot, RankedEntry

        entries = tuple(
            RankedEntry(i + 1, parse_domain(n, rules)) for i, n in enumerate(names)
        )
        snapshot = ProviderSnapshot(Provider.ALEXA, dt.date.today(), entries)
        rows = metrics.tld_distribution(snapshot)
        lines = ["tld,count,cumulative_fraction\n"]
        lines += [f"{r.tld},{r.count},{r.cumulative_fraction!r}\n" for r in rows]
        _emit("".join(lines), args.out)
        return OK

    if args.metric == "health":
        names = _load_ranking_names(args.list, record_store)
        crawl = load_crawl_csv(Path(args.crawl).read_bytes())
        counts = metrics.health_summary(names, crawl)
        lines = ["category,count\n"]
        lines += [f"{cat},{count}\n" for cat, count in counts.items()]
        _emit("".join(lines), args.out)
        return OK

    # flags
    names = _load_ranking_names(args.list, record_store)
    flag_sets = []
    for token in args.flags:
        path = Path(token)
        flag_sets.append(FlagSet.from_bytes(path.read_bytes(), label=path.stem))
    cuts = [len(names) if c == "full" else int(c) for c in args.cuts.split(",")]
    rows = metrics.flag_summary(names, flag_sets, cuts)
    lines = ["flag,cut,count\n"]
    lines += [f"{r.label},{r.cut},{r.count}\n" for r in rows]
    _emit("".join(lines), args.out)
    return OK


# -- resilience ---------------------------------------------------------


def _load_scored(
    token: str,
    record_store: records.RecordStore,
    method_flag: str | None,
    nref_flag: int | None,
) -> tuple[list[float], Method, int]:
    """Scores plus scoring parameters from a record id or an extended CSV."""
    path = Path(token)
    if path.exists():
        if method_flag is None or nref_flag is None:
            raise SystemExit(
                _usage("--method and --nref are required when --list is a raw file")
            )
        text = path.read_text(encoding="utf-8")
        method = Method(method_flag)
        n_ref = nref_flag
    elif record_store.exists(token):
        text = records.serve_record(record_store, token, "extended").decode("utf-8")
        manifest = records.parse_manifest_text(
            records.serve_record(record_store, token, "manifest").decode("utf-8")
        )
        config_map = dict(
            line.split(": ", 1) for line in manifest["config_lines"]  # type: ignore[union-attr]
        )
        method = Method(config_map["config.method"])
        n_ref = int(config_map["config.n_ref"])
    else:
        raise NotFoundError(f"{token!r} is neither a file nor a stored record id")
    scores = []
    for line in text.splitlines():
        if not line.strip() or line.lower().startswith("rank,"):
            continue
        parts = line.split(",")
        if len(parts) < 3:
            raise RankmergeError(
                "threshold queries need the extended format rank,domain,score,..."
            )
        scores.append(float(parts[2]))
    return scores, method, n_ref


def _cmd_resilience(args: argparse.Namespace) -> int:
    root = _archive_root(args)
    record_store = records.RecordStore(root)

    if args.analysis == "threshold":
        scores, method, n_ref = _load_scored(
            args.list, record_store, args.method, args.nref
        )
        if not 1 <= args.target <= len(scores):
            raise SystemExit(_usage(f"--target must be in 1..{len(scores)}"))
        rank = resilience.threshold_rank(
            scores[args.target - 1],
            method,
            n_ref,
            days=args.days,
            providers=args.providers,
        )
        lines = ["target_rank,days,providers,required_rank\n"]
        sentinel = "unreachable" if rank is None else str(rank)
        lines.append(f"{args.target},{args.days},{args.providers},{sentinel}\n")
        _emit("".join(lines), args.out)
        return OK

    # displace
    names = _load_ranking_names(args.list, record_store)
    flagged_by_provider = {}
    for token in args.flagged:
        path = Path(token)
        flags = FlagSet.from_bytes(path.read_bytes(), label=path.stem)
        flagged_by_provider[flags.label] = flags.domains
    cuts = (
        [int(c) for c in args.cuts.split(",")] if args.cuts else [args.k or len(names)]
    )
    profile = resilience.displacement_profile(names, flagged_by_provider, cuts)
    lines = ["provider,cut,cost\n"]
    lines += [f"{label},{cut},{cost}\n" for label, cut, cost in profile.rows]
    lines += [f"(minimum),{cut},{cost}\n" for cut, cost in profile.minima]
    _emit("".join(lines), args.out)
    return OK


# -- records ------------------------------------------------------------


def _cmd_records(args: argparse.Namespace) -> int:
    record_store = records.RecordStore(_archive_root(args))
    if args.records_cmd == "verify":
        report = records.verify_record(record_store, args.list_id)
        if report.ok:
            print(f"{args.list_id}: ok")
            return OK
        print(f"{args.list_id}: corrupted ({', '.join(report.mismatches)})")
        return DATA_ERROR
    if args.records_cmd == "show":
        payload = records.serve_record(record_store, args.list_id, args.format)
        sys.stdout.write(payload.decode("utf-8"))
        return OK
    # serve
    server = records.make_server(record_store, args.port)
    host, port = server.server_address[:2]
    print(f"serving records on http://{host}:{port} (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return OK


# -- parser -------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="rankmerge", description=__doc__)
    parser.add_argument(
        "--archive",
        help=f"archive root (default: ${ARCHIVE_ENV} or ./archive); records live under it",
    )
    parser.add_argument("--psl", help="public-suffix rules file (default: bundled snapshot)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_ingest = sub.add_parser("ingest", help="parse a provider file into the archive")
    p_ingest.add_argument("provider", choices=[p.value for p in Provider])
    p_ingest.add_argument("date", help="download date, YYYY-MM-DD")
    p_ingest.add_argument("source", help="file path or http(s) URL (zip accepted)")
    p_ingest.add_argument("--overwrite", action="store_true")
    p_ingest.set_defaults(func=_cmd_ingest)

    p_combine = sub.add_parser("combine", help="build a combined list from the archive")
    p_combine.add_argument("--providers", required=True, help="comma-separated provider names")
    p_combine.add_argument("--days", required=True, help="window as START..END or a single day")
    p_combine.add_argument(
        "--method", default="dowdall", choices=[m.value for m in Method]
    )
    p_combine.add_argument("--nref", type=int, default=DEFAULT_N_REF)
    p_combine.add_argument("--umbrella-pld", action="store_true")
    p_combine.add_argument(
        "--input-truncate", help="top-X cut: a number, or provider=N[,provider=N...]"
    )
    p_combine.add_argument("--min-providers", type=int, default=1)
    p_combine.add_argument("--min-days", type=int, default=1)
    p_combine.add_argument("--tld-include")
    p_combine.add_argument("--tld-exclude")
    p_combine.add_argument("--subdomain", help='first-label selector, e.g. "login.*"')
    p_combine.add_argument("--pld-dedupe", action="store_true")
    p_combine.add_argument("--crawl", help="crawl results CSV; enables the health filter")
    p_combine.add_argument("--health-status", help="allowed status codes (default 200)")
    p_combine.add_argument("--health-min-bytes", type=int, default=512)
    p_combine.add_argument("--health-missing", choices=["keep", "drop"], default="keep")
    p_combine.add_argument("--benign-exclude", help="flag file of domains to remove")
    p_combine.add_argument("--popular-intersect", help="domain-set file to intersect with")
    p_combine.add_argument("--output-truncate", type=int)
    p_combine.add_argument("--out", help="also write the list CSV to this path")
    p_combine.set_defaults(func=_cmd_combine)

    p_metrics = sub.add_parser("metrics", help="similarity/stability/representativeness tables")
    msub = p_metrics.add_subparsers(dest="metric", required=True, parser_class=_Parser)
    m_rbo = msub.add_parser("rbo")
    m_rbo.add_argument("--a", required=True, help="ranking: record id or file")
    m_rbo.add_argument("--b", required=True, help="ranking: record id or file")
    m_rbo.add_argument("--p", type=float, default=0.9)
    m_rbo.add_argument("--k", type=int)
    m_rbo.add_argument("--out")
    m_stab = msub.add_parser("stability")
    m_stab.add_argument("--provider", required=True, choices=[p.value for p in Provider])
    m_stab.add_argument("--days", required=True)
    m_stab.add_argument("--out")
    m_tlds = msub.add_parser("tlds")
    m_tlds.add_argument("--list", required=True)
    m_tlds.add_argument("--out")
    m_health = msub.add_parser("health")
    m_health.add_argument("--list", required=True)
    m_health.add_argument("--crawl", required=True)
    m_health.add_argument("--out")
    m_flags = msub.add_parser("flags")
    m_flags.add_argument("--list", required=True)
    m_flags.add_argument("--flags", required=True, action="append")
    m_flags.add_argument("--cuts", default="full", help='comma list of K or "full"')
    m_flags.add_argument("--out")
    p_metrics.set_defaults(func=_cmd_metrics)

    p_res = sub.add_parser("resilience", help="manipulation-effort estimates")
    rsub = p_res.add_subparsers(dest="analysis", required=True, parser_class=_Parser)
    r_thr = rsub.add_parser("threshold")
    r_thr.add_argument("--list", required=True, help="record id or extended CSV file")
    r_thr.add_argument("--target", type=int, required=True)
    r_thr.add_argument("--days", type=int, default=1)
    r_thr.add_argument("--providers", type=int, default=1)
    r_thr.add_argument("--method", choices=[m.value for m in Method])
    r_thr.add_argument("--nref", type=int)
    r_thr.add_argument("--out")
    r_disp = rsub.add_parser("displace")
    r_disp.add_argument("--list", required=True, help="record id or ranking file")
    r_disp.add_argument("--flagged", required=True, action="append")
    r_disp.add_argument("--k", type=int)
    r_disp.add_argument("--cuts", help="comma-separated cut sizes")
    r_disp.add_argument("--out")
    p_res.set_defaults(func=_cmd_resilience)

    p_rec = sub.add_parser("records", help="verify, export or serve stored lists")
    recsub = p_rec.add_subparsers(dest="records_cmd", required=True, parser_class=_Parser)
    rec_verify = recsub.add_parser("verify")
    rec_verify.add_argument("list_id")
    rec_show = recsub.add_parser("show")
    rec_show.add_argument("list_id")
    rec_show.add_argument("--format", choices=list(records.FORMATS), default="list")
    rec_serve = recsub.add_parser("serve")
    rec_serve.add_argument("--port", type=int, default=8321)
    p_rec.set_defaults(func=_cmd_records)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else USAGE_ERROR
        return code
    except RankmergeError as exc:
        print(f"rankmerge: {exc}", file=sys.stderr)
        return DATA_ERROR
    except OSError as exc:
        print(f"rankmerge: {exc}", file=sys.stderr)
        return DATA_ERROR
    except ValueError as exc:  # bad parameter values (config invariants etc.)
        print(f"rankmerge: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
