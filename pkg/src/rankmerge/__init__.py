"""rankmerge: combine daily top-sites rankings into stable, filtered,
reproducible research lists, with metrics and manipulation-resistance
analysis on top."""

from .archive import ArchiveStore
from .combine import (
    CombineConfig,
    CombinedList,
    CrawlResult,
    FlagSet,
    HealthFilter,
    Method,
    ScoredDomain,
    apply_domain_filters,
    apply_health_filters,
    apply_output_truncation,
    apply_set_filters,
    build_list,
    combine,
    load_crawl_csv,
    score_borda,
    score_dowdall,
    umbrella_to_pld,
)
from .domains import DomainRecord, parse_domain
from .errors import (
    ConflictError,
    CorruptDataError,
    EmptyInputError,
    InvalidSnapshotError,
    MalformedDomainError,
    MissingColumnError,
    NotFoundError,
    RankmergeError,
)
from .ingest import (
    ParseReport,
    parse_alexa_umbrella_csv,
    parse_majestic_csv,
    parse_quantcast,
)
from .metrics import (
    RboParams,
    StabilityReport,
    daily_intersection,
    flag_summary,
    health_summary,
    rbo,
    stability_series,
    tld_distribution,
)
from .psl import PublicSuffixRules, default_rules
from .records import (
    ListManifest,
    RecordStore,
    VerifyReport,
    make_manifest,
    serve_record,
    verify_record,
)
from .resilience import (
    DisplacementQuery,
    ThresholdQuery,
    displacement_cost,
    displacement_profile,
    entry_threshold,
    threshold_rank,
)
from .snapshots import Provider, ProviderSnapshot, RankedEntry, snapshot_digest

__version__ = "0.1.0"

__all__ = [
    "ArchiveStore",
    "CombineConfig",
    "CombinedList",
    "ConflictError",
    "CorruptDataError",
    "CrawlResult",
    "DisplacementQuery",
    "DomainRecord",
    "EmptyInputError",
    "FlagSet",
    "HealthFilter",
    "InvalidSnapshotError",
    "ListManifest",
    "MalformedDomainError",
    "Method",
    "MissingColumnError",
    "NotFoundError",
    "ParseReport",
    "Provider",
    "ProviderSnapshot",
    "PublicSuffixRules",
    "RankedEntry",
    "RankmergeError",
    "RboParams",
    "RecordStore",
    "ScoredDomain",
    "StabilityReport",
    "ThresholdQuery",
    "VerifyReport",
    "apply_domain_filters",
    "apply_health_filters",
    "apply_output_truncation",
    "apply_set_filters",
    "build_list",
    "combine",
    "daily_intersection",
    "default_rules",
    "displacement_cost",
    "displacement_profile",
    "entry_threshold",
    "flag_summary",
    "health_summary",
    "load_crawl_csv",
    "make_manifest",
    "parse_alexa_umbrella_csv",
    "parse_domain",
    "parse_majestic_csv",
    "parse_quantcast",
    "rbo",
    "score_borda",
    "score_dowdall",
    "serve_record",
    "snapshot_digest",
    "stability_series",
    "threshold_rank",
    "tld_distribution",
    "umbrella_to_pld",
    "verify_record",
]
