"""Command-line interface: extract, corpus, train, recommend, eval, synth, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import corpus as corpus_mod
from . import evaluation, extraction, recommender, synthetic
from .learner import Profile, RatedExample, train as train_profile
from .slots import LEARNER_SLOTS


def _parse_mask(value: str | None) -> tuple[str, ...]:
    if not value:
        return LEARNER_SLOTS
    return tuple(part.strip() for part in value.split(",") if part.strip())


def _parse_points(value: str) -> list[object]:
    points: list[object] = []
    for part in value.split(","):
        part = part.strip()
        if not part:
            continue
        points.append("full" if part.lower() == "full" else int(part))
    if not points:
        raise click.BadParameter("no curve points given")
    return points


def _load_examples(catalog: corpus_mod.Catalog, ratings: dict[str, int]) -> list[RatedExample]:
    examples = []
    for book_id in sorted(ratings):
        book = catalog.get(book_id)
        if book is None:
            raise click.ClickException(f"rated id not in catalog: {book_id}")
        examples.append(RatedExample(book=book, rating=ratings[book_id]))
    return examples


def _print_table(headers: list[str], rows: list[list[str]]) -> None:
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    click.echo(line)
    click.echo("-" * len(line))
    for row in rows:
        click.echo("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))


@click.group()
def main() -> None:
    """Content-based book recommender."""


@main.command()
@click.option("--rules", "rules_path", required=True, type=click.Path(exists=True))
@click.option("--docs", "docs_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def extract(rules_path: str, docs_path: str, out_path: str) -> None:
    """Extract slot fillers from documents into a records file."""
    rules = extraction.load_rule_config(rules_path)
    records = [
        extraction.extract_record(text, doc_id, rules)
        for doc_id, text in extraction.iter_documents(docs_path)
    ]
    count = extraction.write_records(records, out_path)
    click.echo(f"extracted {count} records -> {out_path}")


@main.group()
def corpus() -> None:
    """Build and query tokenized catalogs."""


@corpus.command("build")
@click.option("--rules", "rules_path", required=True, type=click.Path(exists=True))
@click.option("--docs", "docs_path", required=True, type=click.Path(exists=True))
@click.option("--stopwords", "stopwords_path", type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def corpus_build(rules_path: str, docs_path: str, stopwords_path: str | None, out_path: str) -> None:
    """Extract, keep adequate records, tokenize, and write a catalog."""
    rules = extraction.load_rule_config(rules_path)
    stop = (
        corpus_mod.load_stopwords(stopwords_path)
        if stopwords_path
        else corpus_mod.default_stopwords()
    )
    records = [
        extraction.extract_record(text, doc_id, rules)
        for doc_id, text in extraction.iter_documents(docs_path)
    ]
    adequate = extraction.filter_adequate(records)
    catalog = corpus_mod.build_catalog(adequate, stop)
    corpus_mod.write_catalog(catalog, out_path)
    dropped = len(records) - len(adequate)
    click.echo(f"built catalog with {len(catalog)} books ({dropped} dropped) -> {out_path}")


@corpus.command("search")
@click.option("--catalog", "catalog_path", required=True, type=click.Path(exists=True))
@click.option("--stopwords", "stopwords_path", type=click.Path(exists=True))
@click.argument("query", nargs=-1)
def corpus_search(catalog_path: str, stopwords_path: str | None, query: tuple[str, ...]) -> None:
    """List books whose title or authors match every query token."""
    catalog = corpus_mod.read_catalog(catalog_path)
    stop = corpus_mod.load_stopwords(stopwords_path) if stopwords_path else None
    hits = catalog.search(" ".join(query), stop)
    for book in hits:
        click.echo(f"{book.id}\t{book.title_display}")
    click.echo(f"({len(hits)} matches)", err=True)


@main.command("train")
@click.option("--catalog", "catalog_path", required=True, type=click.Path(exists=True))
@click.option("--ratings", "ratings_path", required=True, type=click.Path(exists=True))
@click.option("--lambda", "lam", default=1.0, show_default=True, help="Smoothing mass.")
@click.option("--mask", default=None, help="Comma-separated slot mask (default: all).")
@click.option("--out", "out_path", required=True, type=click.Path())
def train_cmd(catalog_path: str, ratings_path: str, lam: float, mask: str | None, out_path: str) -> None:
    """Train a profile from a catalog and a ratings file."""
    catalog = corpus_mod.read_catalog(catalog_path)
    ratings = corpus_mod.read_ratings(ratings_path)
    examples = _load_examples(catalog, ratings)
    profile = train_profile(examples, lam=lam, mask=_parse_mask(mask))
    profile.save(out_path)
    click.echo(f"trained on {len(examples)} examples -> {out_path}")


@main.command()
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True))
@click.option("--catalog", "catalog_path", required=True, type=click.Path(exists=True))
@click.option("--ratings", "ratings_path", required=True, type=click.Path(exists=True))
@click.option("-n", "top_n", default=10, show_default=True)
@click.option("--bottom", "bottom_n", default=0, help="Also list the n lowest-ranked books.")
@click.option("--explain", "explain_id", default=None, help="Explain one book's score.")
@click.option("--explain-feature", "feature", default=None, help="slot:token provenance.")
@click.option("--features", "features_n", default=0, help="List the n strongest profile cues.")
@click.option("-k", "rows", default=20, show_default=True, help="Explanation rows.")
def recommend(
    profile_path: str,
    catalog_path: str,
    ratings_path: str,
    top_n: int,
    bottom_n: int,
    explain_id: str | None,
    feature: str | None,
    features_n: int,
    rows: int,
) -> None:
    """Rank unrated books and optionally explain scores and cues."""
    profile = Profile.load(profile_path)
    catalog = corpus_mod.read_catalog(catalog_path)
    ratings = corpus_mod.read_ratings(ratings_path)

    if explain_id is not None:
        book = catalog.get(explain_id)
        if book is None:
            raise click.ClickException(f"no such book: {explain_id}")
        result = recommender.explain_recommendation(profile, book, k=rows)
        click.echo(f"{book.title_display} recommended because:")
        _print_table(
            ["Slot", "Word", "Strength"],
            [[r.slot.upper(), r.token.upper(), f"{r.influence:.2f}"] for r in result.rows],
        )
        click.echo(f"(score {result.score:.4f}, prior {result.prior_log_odds:.4f})")
        return

    if feature is not None:
        slot, _, token = feature.partition(":")
        if not token:
            raise click.ClickException("--explain-feature wants slot:token")
        examples = _load_examples(catalog, ratings)
        result = recommender.explain_feature(profile, examples, slot.strip(), token.strip(), k=rows)
        click.echo(f"The word {token.upper()} in slot {slot.upper()} is rated positive due to:")
        _print_table(
            ["Title", "Rating", "Count"],
            [[r.title, str(r.rating), str(r.count)] for r in result.rows],
        )
        return

    if features_n > 0:
        feats = recommender.top_features(profile, features_n)
        _print_table(
            ["Slot", "Word", "Strength"],
            [[slot.upper(), token.upper(), f"{value:.2f}"] for slot, token, value in feats],
        )
        return

    exclude = set(ratings)
    top = recommender.recommend_top(profile, catalog, exclude, top_n)
    _print_table(
        ["Rank", "Score", "Title"],
        [
            [str(i + 1), f"{score:.4f}", catalog.get(book_id).title_display]
            for i, (book_id, score) in enumerate(top)
        ],
    )
    if bottom_n > 0:
        click.echo("\nbottom of the ranking:")
        worst = recommender.bottom(profile, catalog, exclude, bottom_n)
        _print_table(
            ["Rank", "Score", "Title"],
            [
                [f"-{i + 1}", f"{score:.4f}", catalog.get(book_id).title_display]
                for i, (book_id, score) in enumerate(worst)
            ],
        )


@main.command("eval")
@click.option("--catalog", "catalog_path", required=True, type=click.Path(exists=True))
@click.option("--ratings", "ratings_path", required=True, type=click.Path(exists=True))
@click.option("--folds", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--points", default="5,10,20,40,100,full", show_default=True)
@click.option("--lambda", "lam", default=1.0, show_default=True)
@click.option("--mask", default=None)
@click.option("--ablate", default=None, help="Comma-separated slots to remove in a second run.")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--csv", "csv_path", type=click.Path(), default=None)
def eval_cmd(
    catalog_path: str,
    ratings_path: str,
    folds: int,
    seed: int,
    points: str,
    lam: float,
    mask: str | None,
    ablate: str | None,
    out_path: str | None,
    csv_path: str | None,
) -> None:
    """Cross-validated learning curves, optionally with a slot ablation."""
    catalog = corpus_mod.read_catalog(catalog_path)
    ratings = corpus_mod.read_ratings(ratings_path)
    examples = _load_examples(catalog, ratings)
    plan = evaluation.kfold_split([ex.book.id for ex in examples], folds, seed)
    point_list = _parse_points(points)
    mask_t = _parse_mask(mask)

    curve = evaluation.learning_curve(examples, plan, point_list, lam=lam, mask=mask_t)
    ablation = None
    if ablate:
        removed = tuple(part.strip() for part in ablate.split(",") if part.strip())
        ablation = evaluation.ablation_run(
            examples, plan, point_list, removed=removed, lam=lam, mask=mask_t
        )

    def fmt(value: float | None, digits: int) -> str:
        return "" if value is None else f"{value:.{digits}f}"

    table_rows = []
    for point in curve:
        m = point.mean
        table_rows.append(
            [
                point.label,
                fmt(m.acc, 1),
                fmt(m.rec, 1),
                fmt(m.pr, 1),
                fmt(m.pr3, 1),
                fmt(m.pr10, 1),
                fmt(m.f, 1),
                fmt(m.rt3, 2),
                fmt(m.rt10, 2),
                fmt(m.r_s, 2),
            ]
        )
    _print_table(["N", "Acc", "Rec", "Pr", "Pr3", "Pr10", "F", "Rt3", "Rt10", "r_s"], table_rows)

    if ablation is not None:
        click.echo("\nablation (significant one-tailed differences, p < 0.05):")
        for point in ablation.points:
            flags = [
                f"{metric}:+{comp.mean_diff:.3g}"
                for metric, comp in point.comparisons.items()
                if comp.ttest is not None and comp.ttest.significant
            ]
            click.echo(f"  N={point.label}: {' '.join(flags) if flags else '(none)'}")

    report = evaluation.curve_report(curve, folds=folds, seed=seed, ablation=ablation)
    if out_path:
        Path(out_path).write_text(evaluation.report_to_json(report) + "\n", encoding="utf-8")
        click.echo(f"report -> {out_path}")
    if csv_path:
        Path(csv_path).write_text(evaluation.curve_csv(curve, ablation), encoding="utf-8")
        click.echo(f"curves -> {csv_path}")


@main.command()
@click.option("--books", default=1000, show_default=True)
@click.option("--markers", default=200, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--marker-slot", default="words", show_default=True, type=click.Choice(synthetic.MARKER_SLOTS))
@click.option("--out-catalog", required=True, type=click.Path())
@click.option("--out-ratings", required=True, type=click.Path())
def synth(
    books: int, markers: int, seed: int, marker_slot: str, out_catalog: str, out_ratings: str
) -> None:
    """Generate a planted-preference synthetic catalog and ratings."""
    catalog, ratings = synthetic.planted_corpus(
        n_books=books, n_markers=markers, seed=seed, marker_slot=marker_slot
    )
    corpus_mod.write_catalog(catalog, out_catalog)
    corpus_mod.write_ratings(ratings, out_ratings)
    click.echo(f"wrote {len(catalog)} books -> {out_catalog}, ratings -> {out_ratings}")


@main.command()
@click.option("--catalog", "catalog_path", required=True, envvar="BOOKREC_CATALOG", type=click.Path(exists=True))
@click.option("--data-dir", required=True, envvar="BOOKREC_DATA_DIR", type=click.Path())
@click.option("--host", default="127.0.0.1", envvar="BOOKREC_HOST", show_default=True)
@click.option("--port", default=8000, envvar="BOOKREC_PORT", show_default=True)
@click.option("--lambda", "lam", default=1.0, envvar="BOOKREC_LAMBDA", show_default=True)
@click.option("--mask", default=None, envvar="BOOKREC_MASK")
@click.option("--stopwords", "stopwords_path", default=None, envvar="BOOKREC_STOPWORDS", type=click.Path(exists=True))
@click.option("--ui", "ui_dir", default=None, envvar="BOOKREC_UI", type=click.Path(exists=True))
def serve(
    catalog_path: str,
    data_dir: str,
    host: str,
    port: int,
    lam: float,
    mask: str | None,
    stopwords_path: str | None,
    ui_dir: str | None,
) -> None:
    """Run the HTTP service for the interactive feedback loop."""
    import uvicorn

    from .service import ServiceConfig, create_app

    app = create_app(
        ServiceConfig(
            catalog_path=catalog_path,
            data_dir=data_dir,
            lam=lam,
            slot_mask=_parse_mask(mask),
            stopwords_path=stopwords_path,
            ui_dir=ui_dir,
        )
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
