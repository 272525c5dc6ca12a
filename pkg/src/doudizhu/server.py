"""HTTP game service: live human-vs-bot sessions over JSON.

The server is an information-set firewall: a seat's state payload never
contains another seat's hand, only counts, and everything it does contain
can be rebuilt into the exact encoder inputs the networks consume.  Moves
travel in the textual card notation used by the match logs ("3345", "P"),
so an exported session log replays through the rules engine verbatim.

Bot seats act synchronously after each human move (and at session start),
pausing think_delay_ms between moves so games read naturally; tests run
with a zero delay.
"""

from __future__ import annotations

import itertools
import json
import secrets
import threading
import time
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse

from .agents import (Agent, RandomAgent, RuleAgent, UnsupportedAgent,
                     ValueAgent, agent_from_spec)
from .cards import format_cards, parse_cards
from .combos import action_space
from .encode import SeatView
from .game import GameState, IllegalMove, Phase, Role, Side
from .matchlog import MatchRecord, format_log, parse_log, replay
from .moves import legal_ids
from .tournament import top_moves

ROLE_CHARS = {Role.LANDLORD: "L", Role.DOWN: "D", Role.UP: "U"}


@dataclass
class ServerSettings:
    checkpoint: str | None = None
    bid_checkpoint: str | None = None
    preset: str = "desk"
    think_delay_ms: int = 300
    default_bot: str = "rule"


def _move_token(cards: np.ndarray, space) -> str:
    return "P" if not cards.any() else format_cards(cards)


class Session:
    """One live game; all mutation happens under the session lock."""

    def __init__(self, sid: str, state: GameState, human_seat: int | None,
                 agents: dict[int, Agent], hint_agent: Agent | None,
                 think_delay_s: float, rng: np.random.Generator):
        self.sid = sid
        self.state = state
        self.human_seat = human_seat
        self.agents = agents
        self.hint_agent = hint_agent
        # bot-only sessions run the whole game inside one request; no delay
        self.think_delay_s = think_delay_s if human_seat is not None else 0.0
        self.rng = rng
        self.lock = threading.Lock()
        self.events: list[dict] = []
        self.new_event = threading.Condition(self.lock)
        self.record: MatchRecord | None = None
        self.space = action_space()
        if state.phase == Phase.PLAYING:
            self._start_record()

    # ----- events ---------------------------------------------------

    def _emit(self, kind: str, **fields) -> None:
        event = {"id": len(self.events), "type": kind, **fields}
        self.events.append(event)
        self.new_event.notify_all()

    # ----- record keeping -------------------------------------------

    def _start_record(self) -> None:
        st = self.state
        self.record = MatchRecord(hands={
            st.role_of(s): st.hands[s].copy() for s in range(3)})

    # ----- game flow ------------------------------------------------

    def advance_bots(self) -> None:
        """Run bot turns until a human must act or the game ends."""
        while True:
            st = self.state  # redeals swap the state out underneath us
            if st.phase == Phase.BIDDING:
                seat = st.bidder
                if seat == self.human_seat:
                    return
                agent = self.agents[seat]
                history = [b for _, b in st.bid_decisions]
                try:
                    wants = bool(agent.bid(st.hands[seat], history))
                except UnsupportedAgent:
                    wants = RuleAgent().bid(st.hands[seat], history)
                self._apply_bid(seat, wants)
            elif st.phase == Phase.PLAYING and st.winner_side is None:
                seat = st.to_move
                if seat == self.human_seat:
                    return
                if self.think_delay_s > 0:
                    time.sleep(self.think_delay_s)
                legal = st.legal_action_ids()
                view = SeatView.from_state(st, seat)
                aid = int(self.agents[seat].decide(view, legal))
                self._apply_action(seat, aid)
            else:
                return

    def _apply_bid(self, seat: int, wants: bool) -> None:
        st = self.state
        st.bidding_step(wants)
        self._emit("bid", seat=seat, bid=wants,
                   phase=st.phase.name.lower())
        if st.phase == Phase.REDEAL:
            # redeal in place, drawing from the session's own seed stream
            from .cards import deal
            hands, kitty = deal(self.rng)
            first = int(self.rng.integers(3))
            self.state = GameState(hands, kitty, first_bidder=first)
            self._emit("redeal")
        elif st.phase == Phase.PLAYING:
            self._start_record()
            self._emit("playing", landlord_seat=st.landlord_seat)

    def _apply_action(self, seat: int, aid: int) -> None:
        st = self.state
        cards = self.space.cards[aid].copy()
        st.apply_action_id(aid)
        if self.record is not None:
            self.record.moves.append((st.role_of(seat), cards))
        token = _move_token(cards, self.space)
        if st.winner_side is None:
            self._emit("turn", seat=seat, move=token, to_move=st.to_move)
        else:
            result = st.score()
            self._emit("turn", seat=seat, move=token, to_move=None)
            self._emit("terminal",
                       winner="landlord" if result.winner_side == Side.LANDLORD
                       else "peasants",
                       bombs=result.bombs,
                       landlord_points=result.landlord_points)

    # ----- views ----------------------------------------------------

    def state_payload(self) -> dict:
        st = self.state
        seat = self.human_seat
        counts = st.hand_counts() if st.phase != Phase.REDEAL else [0, 0, 0]
        payload = {
            "session_id": self.sid,
            "phase": st.phase.name.lower(),
            "your_seat": seat,
            "hand_counts": counts,
            "bombs": st.bombs_played,
            "landlord_seat": st.landlord_seat
            if st.phase in (Phase.PLAYING, Phase.FINISHED) else None,
            "history": [],
            "to_beat": None,
            "to_move": None,
            "winner": None,
            "bid_history": [
                {"seat": s, "bid": b} for s, b in st.bid_decisions],
        }
        if seat is not None:
            payload["hand"] = format_cards(st.hands[seat]) or ""
        else:
            payload["hands"] = [format_cards(st.hands[s]) for s in range(3)]
        if st.phase == Phase.BIDDING:
            payload["to_move"] = st.bidder
        if st.phase in (Phase.PLAYING, Phase.FINISHED):
            payload["history"] = [
                {"seat": s, "role": ROLE_CHARS[st.role_of(s)],
                 "move": _move_token(self.space.cards[aid], self.space)}
                for s, aid in st.history]
            if st.to_beat_id is not None:
                payload["to_beat"] = _move_token(
                    self.space.cards[st.to_beat_id], self.space)
        if st.phase == Phase.PLAYING:
            payload["to_move"] = st.to_move
        if st.winner_side is not None:
            result = st.score()
            payload["winner"] = ("landlord"
                                 if result.winner_side == Side.LANDLORD
                                 else "peasants")
            payload["landlord_points"] = result.landlord_points
            payload["bombs"] = result.bombs
        return payload

    def legal_tokens(self) -> list[str]:
        st = self.state
        return [_move_token(self.space.cards[aid], self.space)
                for aid in st.legal_action_ids()]


def create_app(settings: ServerSettings | None = None) -> FastAPI:
    settings = settings or ServerSettings()
    app = FastAPI(title="doudizhu service")
    # browser clients are served from elsewhere (static files, dev server)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()

    shared_value_agent: ValueAgent | None = None
    if settings.checkpoint:
        shared_value_agent = ValueAgent.from_checkpoint(
            settings.checkpoint, preset=settings.preset, name="bot",
            bid_path=settings.bid_checkpoint)

    def make_bot(spec: str | None) -> Agent:
        if spec is None or spec == "default":
            if shared_value_agent is not None:
                return shared_value_agent
            return agent_from_spec(settings.default_bot,
                                   preset=settings.preset)
        return agent_from_spec(spec, preset=settings.preset)

    def get_session(sid: str) -> Session:
        with sessions_lock:
            session = sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404,
                                detail=f"unknown session {sid}")
        return session

    @app.post("/sessions")
    def create_session(body: dict | None = None):
        body = body or {}
        human_seat = body.get("human_seat", 0)
        if human_seat is not None:
            human_seat = int(human_seat)
            if human_seat not in (0, 1, 2):
                raise HTTPException(status_code=422,
                                    detail="human_seat must be 0, 1 or 2")
        bidding = bool(body.get("bidding", False))
        seed = body.get("seed")
        rng = np.random.default_rng(
            int(seed) if seed is not None else secrets.randbits(32))
        from .cards import deal
        hands, kitty = deal(rng)
        if bidding:
            state = GameState(hands, kitty, first_bidder=int(rng.integers(3)))
        else:
            state = GameState(hands, kitty, landlord_seat=0)
        agents = {s: make_bot(body.get("bots", {}).get(str(s)))
                  for s in range(3) if s != human_seat}
        hint_agent = shared_value_agent
        sid = secrets.token_hex(8)
        session = Session(
            sid, state, human_seat, agents, hint_agent,
            think_delay_s=settings.think_delay_ms / 1000.0, rng=rng)
        with sessions_lock:
            sessions[sid] = session
        with session.lock:
            session.advance_bots()
            payload = session.state_payload()
        return payload

    @app.get("/sessions/{sid}/state")
    def get_state(sid: str):
        session = get_session(sid)
        with session.lock:
            return session.state_payload()

    @app.get("/sessions/{sid}/legal")
    def get_legal(sid: str):
        session = get_session(sid)
        with session.lock:
            st = session.state
            if st.phase == Phase.BIDDING:
                if st.bidder != session.human_seat:
                    raise HTTPException(status_code=409,
                                        detail="not your turn")
                return {"bidding": True, "moves": ["bid", "nobid"]}
            if st.phase != Phase.PLAYING or st.winner_side is not None:
                raise HTTPException(status_code=409, detail="game over")
            if st.to_move != session.human_seat:
                raise HTTPException(status_code=409, detail="not your turn")
            return {"bidding": False, "moves": session.legal_tokens()}

    @app.post("/sessions/{sid}/move")
    def post_move(sid: str, body: dict):
        session = get_session(sid)
        with session.lock:
            st = session.state
            if session.human_seat is None:
                raise HTTPException(status_code=409,
                                    detail="spectator session")
            if st.phase == Phase.BIDDING:
                if st.bidder != session.human_seat:
                    raise HTTPException(status_code=409,
                                        detail="not your turn")
                if "bid" not in body:
                    raise HTTPException(status_code=422,
                                        detail="bidding phase expects "
                                               "{\"bid\": true|false}")
                session._apply_bid(session.human_seat, bool(body["bid"]))
                session.advance_bots()
                return session.state_payload()
            if st.phase != Phase.PLAYING or st.winner_side is not None:
                raise HTTPException(status_code=409, detail="game over")
            if st.to_move != session.human_seat:
                raise HTTPException(status_code=409, detail="not your turn")
            token = str(body.get("move", "")).strip().upper()
            if not token:
                raise HTTPException(status_code=422,
                                    detail="missing move")
            legal = st.legal_action_ids()
            if token == "P":
                aid = session.space.pass_id
            else:
                try:
                    cards = parse_cards(token)
                except ValueError as exc:
                    raise HTTPException(status_code=422, detail={
                        "reason": f"unparseable move: {exc}",
                        "legal": session.legal_tokens()})
                found = session.space.id_of(cards)
                aid = -1 if found is None else int(found)
            if aid not in set(int(x) for x in legal):
                raise HTTPException(status_code=422, detail={
                    "reason": f"illegal move {token}",
                    "legal": session.legal_tokens()})
            session._apply_action(session.human_seat, aid)
            session.advance_bots()
            return session.state_payload()

    @app.get("/sessions/{sid}/hints")
    def get_hints(sid: str, k: int = Query(default=3, ge=1, le=50)):
        session = get_session(sid)
        if session.hint_agent is None:
            raise HTTPException(status_code=404, detail="hints disabled")
        with session.lock:
            st = session.state
            if (st.phase != Phase.PLAYING or st.winner_side is not None
                    or st.to_move != session.human_seat):
                raise HTTPException(status_code=409, detail="not your turn")
            legal = st.legal_action_ids()
            view = SeatView.from_state(st, session.human_seat)
            try:
                hints = top_moves(session.hint_agent, view, legal, k=k)
            except UnsupportedAgent:
                raise HTTPException(status_code=404, detail="hints disabled")
            return {"k": k, "hints": hints}

    @app.get("/sessions/{sid}/log")
    def get_log(sid: str):
        session = get_session(sid)
        with session.lock:
            if (session.record is None
                    or session.state.winner_side is None):
                raise HTTPException(status_code=409,
                                    detail="game not finished")
            return {"log": format_log(session.record)}

    @app.post("/replay")
    def post_replay(body: dict):
        line = str(body.get("log", ""))
        try:
            record = parse_log(line)
            final = replay(record)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        space = action_space()
        steps = []
        state = GameState([record.hands[Role(i)].copy() for i in range(3)],
                          np.zeros(15, dtype=np.int8), landlord_seat=0)
        for role, cards in record.moves:
            steps.append({
                "seat": state.to_move,
                "role": ROLE_CHARS[role],
                "move": _move_token(cards, space),
                "hands_after": None,
            })
            aid = space.pass_id if not cards.any() else space.id_of(cards)
            state.apply_action_id(aid)
            steps[-1]["hands_after"] = [format_cards(state.hands[s]) or ""
                                        for s in range(3)]
        result = final.score()
        return {
            "hands": [format_cards(record.hands[Role(i)]) for i in range(3)],
            "steps": steps,
            "winner": "landlord" if result.winner_side == Side.LANDLORD
            else "peasants",
            "landlord_points": result.landlord_points,
            "bombs": result.bombs,
        }

    @app.get("/sessions/{sid}/events")
    def get_events(sid: str, request: Request,
                   last_event_id: int | None = Query(default=None)):
        session = get_session(sid)
        start = 0
        header = request.headers.get("last-event-id")
        if header is not None:
            start = int(header) + 1
        elif last_event_id is not None:
            start = int(last_event_id) + 1

        def stream():
            cursor = start
            while True:
                event = None
                finished = False
                with session.lock:
                    if cursor < len(session.events):
                        event = session.events[cursor]
                    elif (session.events
                          and session.events[-1]["type"] == "terminal"):
                        finished = True
                    else:
                        session.new_event.wait(timeout=10.0)
                        if cursor < len(session.events):
                            event = session.events[cursor]
                if finished:
                    return
                if event is None:  # timed out; nudge proxies, stay open
                    yield ": keep-alive\n\n"
                    continue
                cursor += 1
                yield (f"id: {event['id']}\n"
                       f"event: {event['type']}\n"
                       f"data: {json.dumps(event)}\n\n")

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app


__all__ = ["ServerSettings", "Session", "create_app"]
