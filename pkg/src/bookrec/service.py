"""HTTP facade for the interactive rate / retrain / recommend loop.

Single-user session over one catalog. Ratings are upserts into an
append-only log; training is an explicit step that atomically swaps the
served profile and bumps a generation counter that every response carries,
so a client can detect stale views. State survives restarts via the log
plus a profile snapshot.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles

from .corpus import Catalog, default_stopwords, load_stopwords, read_catalog
from .learner import Profile, RatedExample, train
from .recommender import bottom, explain_feature, explain_recommendation, recommend_top
from .slots import LEARNER_SLOTS

RATINGS_LOG = "ratings.jsonl"
PROFILE_SNAPSHOT = "profile.json"


class ApiError(Exception):
    def __init__(self, code: str, message: str, status: int):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status

    @classmethod
    def not_found(cls, message: str) -> "ApiError":
        return cls("not_found", message, 404)

    @classmethod
    def invalid_rating(cls, message: str) -> "ApiError":
        return cls("invalid_rating", message, 400)

    @classmethod
    def untrained(cls, message: str) -> "ApiError":
        return cls("untrained", message, 409)

    @classmethod
    def bad_request(cls, message: str) -> "ApiError":
        return cls("bad_request", message, 400)


@dataclass
class ServiceConfig:
    catalog_path: str | Path
    data_dir: str | Path
    lam: float = 1.0
    slot_mask: tuple[str, ...] = LEARNER_SLOTS
    stopwords_path: str | Path | None = None
    ui_dir: str | Path | None = None


@dataclass
class SessionState:
    catalog: Catalog
    config: ServiceConfig
    ratings: dict[str, int] = field(default_factory=dict)
    current: tuple[Profile | None, int] = (None, 0)  # swapped atomically
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def data_dir(self) -> Path:
        return Path(self.config.data_dir)

    @property
    def ratings_log(self) -> Path:
        return self.data_dir / RATINGS_LOG

    @property
    def profile_snapshot(self) -> Path:
        return self.data_dir / PROFILE_SNAPSHOT

    def restore(self) -> None:
        self.data_dir.mkdir(parents=True, exist_ok=True)
        if self.ratings_log.exists():
            with open(self.ratings_log, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        doc = json.loads(line)
                        self.ratings[doc["id"]] = doc["rating"]
        if self.profile_snapshot.exists():
            doc = json.loads(self.profile_snapshot.read_text(encoding="utf-8"))
            self.current = (Profile.from_dict(doc["profile"]), doc["generation"])

    def rate(self, book_id: str, rating: int) -> int:
        with self.lock:
            self.ratings[book_id] = rating
            with open(self.ratings_log, "a", encoding="utf-8") as fh:
                fh.write(json.dumps({"id": book_id, "rating": rating}))
                fh.write("\n")
            return len(self.ratings)

    def retrain(self) -> tuple[int, int]:
        with self.lock:
            if not self.ratings:
                raise ApiError.untrained("no ratings stored; rate some books first")
            examples = [
                RatedExample(book=self.catalog.get(book_id), rating=rating)
                for book_id, rating in sorted(self.ratings.items())
            ]
            profile = train(examples, lam=self.config.lam, mask=self.config.slot_mask)
            generation = self.current[1] + 1
            snapshot = {"generation": generation, "profile": profile.to_dict()}
            tmp = self.profile_snapshot.with_suffix(".tmp")
            tmp.write_text(json.dumps(snapshot, ensure_ascii=False, sort_keys=True), encoding="utf-8")
            os.replace(tmp, self.profile_snapshot)
            self.current = (profile, generation)
            return generation, len(examples)

    def trained(self) -> tuple[Profile, int]:
        profile, generation = self.current
        if profile is None:
            raise ApiError.untrained("no profile trained yet; POST /train first")
        return profile, generation

    def training_examples(self) -> list[RatedExample]:
        return [
            RatedExample(book=self.catalog.get(book_id), rating=rating)
            for book_id, rating in sorted(self.ratings.items())
        ]


def _book_summary(state: SessionState, book) -> dict:
    return {
        "id": book.id,
        "title": book.title_display,
        "rating": state.ratings.get(book.id),
    }


def create_app(config: ServiceConfig) -> FastAPI:
    catalog = read_catalog(config.catalog_path)
    stopwords = (
        load_stopwords(config.stopwords_path) if config.stopwords_path else default_stopwords()
    )
    state = SessionState(catalog=catalog, config=config)
    state.restore()

    app = FastAPI(title="bookrec service")
    app.state.session = state
    # single-user local tool; permissive CORS lets a separately served UI talk to it
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def on_api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "bad_request", "message": str(exc.errors()[:1])}},
        )

    @app.get("/status")
    def status():
        profile, generation = state.current
        return {
            "generation": generation,
            "ratings": len(state.ratings),
            "catalog_size": len(catalog),
            "trained": profile is not None,
        }

    @app.get("/books")
    def list_books(q: str = "", page: int = 1, page_size: int = 20):
        if page < 1 or not 1 <= page_size <= 200:
            raise ApiError.bad_request("page must be >= 1 and page_size in 1..200")
        hits = catalog.search(q, stopwords)
        start = (page - 1) * page_size
        items = [_book_summary(state, b) for b in hits[start : start + page_size]]
        return {"items": items, "total": len(hits), "page": page, "page_size": page_size}

    @app.get("/books/{book_id}")
    def get_book(book_id: str):
        book = catalog.get(book_id)
        if book is None:
            raise ApiError.not_found(f"no such book: {book_id}")
        summary = _book_summary(state, book)
        summary["bag_sizes"] = {slot: book.slot_length(slot) for slot in book.bags}
        return summary

    @app.post("/ratings")
    def post_rating(payload: dict = Body(...)):
        book_id = payload.get("id")
        if not isinstance(book_id, str) or not book_id:
            raise ApiError.bad_request("body must carry a string 'id'")
        rating = payload.get("rating")
        if isinstance(rating, bool) or not isinstance(rating, int) or not 1 <= rating <= 10:
            raise ApiError.invalid_rating(f"rating must be an integer 1..10, got {rating!r}")
        if book_id not in catalog:
            raise ApiError.not_found(f"no such book: {book_id}")
        count = state.rate(book_id, rating)
        return {"id": book_id, "rating": rating, "rating_count": count}

    @app.get("/ratings")
    def list_ratings():
        items = [
            {"id": book_id, "rating": rating, "title": catalog.get(book_id).title_display}
            for book_id, rating in sorted(state.ratings.items())
        ]
        return {"items": items, "count": len(items)}

    @app.post("/train")
    def post_train():
        generation, examples = state.retrain()
        return {"generation": generation, "examples": examples}

    def _ranked_response(entries, generation: int) -> dict:
        return {
            "generation": generation,
            "entries": [
                {
                    "rank": i + 1,
                    "id": book_id,
                    "title": catalog.get(book_id).title_display,
                    "score": score,
                }
                for i, (book_id, score) in enumerate(entries)
            ],
        }

    @app.get("/recommendations")
    def recommendations(n: int = 10):
        if n < 0:
            raise ApiError.bad_request("n must be >= 0")
        profile, generation = state.trained()
        entries = recommend_top(profile, catalog, exclude=set(state.ratings), n=n)
        return _ranked_response(entries, generation)

    @app.get("/bottom")
    def bottom_list(n: int = 10):
        if n < 0:
            raise ApiError.bad_request("n must be >= 0")
        profile, generation = state.trained()
        entries = bottom(profile, catalog, exclude=set(state.ratings), n=n)
        return _ranked_response(entries, generation)

    @app.get("/explain/{book_id}")
    def explain(book_id: str, k: int = 20):
        profile, generation = state.trained()
        book = catalog.get(book_id)
        if book is None:
            raise ApiError.not_found(f"no such book: {book_id}")
        result = explain_recommendation(profile, book, k=k if k >= 0 else None)
        return {
            "generation": generation,
            "id": book.id,
            "title": book.title_display,
            "score": result.score,
            "prior_log_odds": result.prior_log_odds,
            "rows": [
                {
                    "slot": row.slot,
                    "token": row.token,
                    "strength": row.strength,
                    "count": row.count,
                    "influence": row.influence,
                }
                for row in result.rows
            ],
        }

    @app.get("/explain-feature/{slot}/{token}")
    def explain_feature_view(slot: str, token: str, k: int = 5):
        profile, generation = state.trained()
        try:
            result = explain_feature(
                profile, state.training_examples(), slot, token, k=k if k >= 0 else None
            )
        except LookupError:
            raise ApiError.not_found(f"feature not in trained vocabulary: {slot}:{token}")
        return {
            "generation": generation,
            "slot": slot,
            "token": token,
            "strength": result.strength,
            "rows": [
                {
                    "id": row.book_id,
                    "title": row.title,
                    "rating": row.rating,
                    "count": row.count,
                }
                for row in result.rows
            ],
        }

    if config.ui_dir:
        app.mount("/ui", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

        @app.get("/")
        def index():
            return RedirectResponse(url="/ui/")

    return app
