"""Deterministic synthetic chat corpora with ground truth.

Groups are read periodically by one or two capture servers. Each reading
re-scrolls a little past the previous one, so messages show up several times;
a second server reading the same groups adds more copies. Some users send the
same message twice in a minute (true duplicates), some groups change uid
mid-way (rename events), and scam and fake-news templates are planted with
token-level mutations. Message ids are stable across readings, so the
ground truth can name exactly which messages survive deduplication.

Randomness comes from a single numpy ``Generator`` over PCG64.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from chatcorpus.ingest import FIELDS
from chatcorpus.model import derive_uid, format_time, parse_time
from chatcorpus.text import stem

PRNG = "PCG64"

COMMON_WORDS = """
hola buenos dias gracias amigos grupo informacion ayuda trabajo empleo casa familia
dinero pesos dolares bolivares precio comprar vender venta cambio tasa transferencia
banco cuenta pago efectivo frontera migracion pasaporte permiso documentos cedula
consulado registro bus viaje pasaje terminal ruta camino llegar salir semana manana
noche hoy ayer comida mercado arroz harina aceite leche medicinas salud hospital
clinica doctor vacuna virus cuarentena alcaldia gobierno noticias anuncio reunion
iglesia escuela ninos hijos madre padre hermano vecino barrio ciudad pueblo calle
apartamento habitacion alquiler arriendo contrato jefe salario horario turno domicilio
moto carro taxi telefono numero mensaje llamar escribir enviar recibir foto video audio
importante urgente favor necesito busco ofrezco disponible interesados gratis barato
rapido seguro confiable pregunta respuesta problema solucion ley derechos abogado tramite
""".split()

PLACES = """
cucuta bogota medellin cali barranquilla bucaramanga pamplona arauca maicao riohacha
valencia maracaibo caracas barquisimeto merida tachira zulia lara quito guayaquil lima
santiago villa rosario ureña paraguachon pasto ipiales tulcan tumbes soacha bello
envigado itagui sincelejo monteria cartagena santa marta villavicencio tunja neiva
""".split()

GOODS = """
celulares zapatos ropa perfumes helados empanadas arepas tortas pasteles cafe queso
carne pollo pescado verduras frutas cosmeticos uniformes mochilas juguetes cables
bicicletas repuestos baterias cargadores lentes relojes bolsos cortinas colchones
""".split()

SCAM_TEMPLATES = [
    "obtenga su prestamo inmediato sin codeudor ni papeles escribanos al interno solo hoy",
    "gana dinero desde casa trabajando dos horas diarias con tu celular cupos limitados",
    "bono del gobierno para venezolanos registrate en el enlace y recibe tu pago hoy",
    "plazavea regala cupones de compra por aniversario reclama el tuyo en el enlace",
    "prestamos rapidos aprobados en minutos sin revisar centrales de riesgo llama ya",
    "invierte cien mil pesos y recibe el triple en una semana garantizado escribe ya",
]

FAKE_TEMPLATES = [
    "el gobierno cerrara la frontera manana por tiempo indefinido compartan antes que borren",
    "tomar agua caliente con limon cada hora mata el virus segun medicos chinos",
    "van a deportar a todos los venezolanos sin permiso desde el lunes urgente compartir",
    "la vacuna trae un chip para rastrear a las personas no se dejen vacunar",
    "regalaran mercados en la alcaldia a quien presente cedula venezolana este viernes",
    "suspenden todos los vuelos y buses del pais desde esta noche confirmado",
]

SCAM_WORDS = """
prestamo obtenga gratis bono cupon premio ganador regalo inmediato aprobado invierte
enlace registrate reclama oferta exclusiva garantizado ganancia dinero cupos limitados
""".split()

# Relative message volume per local hour, low overnight.
HOUR_WEIGHTS = [2, 1, 1, 1, 1, 2, 4, 6, 8, 9, 9, 9, 10, 9, 8, 8, 8, 9, 10, 10, 9, 7, 5, 3]

COUNTRY_PREFIX = {"CO": ("57", "3", 9), "VE": ("58", "4", 9), "EC": ("593", "9", 8),
                  "PE": ("51", "9", 8), "OTHER": ("34", "6", 8)}


class ConfigError(ValueError):
    pass


@dataclass
class GenConfig:
    seed: int = 7
    n_groups: int = 30
    n_users: int = 1200
    days: int = 30
    start: str = "2020-03-01T05:00:00Z"
    tz_offset: float = -5.0
    # group membership
    size_exponent: float = 2.0
    min_group_size: int = 5
    max_group_size: int = 120
    country_mix: dict = field(default_factory=lambda: {"CO": 0.45, "VE": 0.4, "EC": 0.05,
                                                       "PE": 0.04, "OTHER": 0.06})
    mix_concentration: float = 3.0
    # activity
    daily_rate_mean: float = 12.0
    daily_rate_sigma: float = 0.7
    kind_mix: dict = field(default_factory=lambda: {"text": 0.62, "image": 0.2,
                                                    "video": 0.06, "audio": 0.12})
    caption_rate: float = 0.2
    forwarded_rate: float = 0.15
    emoji_rate: float = 0.2
    reshare_rate: float = 0.1
    reply_prob: float = 0.15
    reply_window: int = 8
    missing_parent_rate: float = 0.02
    true_dup_rate: float = 0.01
    # planted content
    n_scam_templates: int = 6
    scam_instances: int = 30
    n_fake_templates: int = 6
    fake_instances: int = 20
    mutation: int = 2
    keyword: str = "trocha"
    keyword_rate: float = 0.02
    keyword_spike_day: int = 20
    keyword_spike_rate: float = 0.25
    # capture
    n_servers: int = 2
    read_interval_hours: float = 24.0
    rescroll_fraction: float = 0.25
    n_rename_events: int = 2
    rename_overlap: float = 1.0
    no_icon_fraction: float = 0.2

    RATES = ("caption_rate", "forwarded_rate", "emoji_rate", "reshare_rate", "reply_prob",
             "missing_parent_rate", "true_dup_rate", "keyword_rate", "keyword_spike_rate",
             "rescroll_fraction", "rename_overlap", "no_icon_fraction")
    COUNTS = ("n_groups", "n_users", "days", "min_group_size", "max_group_size",
              "n_scam_templates", "scam_instances", "n_fake_templates", "fake_instances",
              "mutation", "n_rename_events", "reply_window")

    def validate(self) -> None:
        for name in self.RATES:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name}={v} is not in [0, 1]")
        for name in self.COUNTS:
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.n_servers not in (1, 2):
            raise ConfigError("n_servers must be 1 or 2")
        if self.read_interval_hours <= 0 or self.days < 1 and self.n_groups:
            raise ConfigError("need a positive read interval and at least one day")
        if self.min_group_size < 1 or self.max_group_size < self.min_group_size:
            raise ConfigError("bad group size bounds")
        if self.n_rename_events > self.n_groups:
            raise ConfigError("more rename events than groups")
        if self.n_users < self.max_group_size and self.n_groups:
            raise ConfigError("n_users must cover the largest group")
        for mix in (self.country_mix, self.kind_mix):
            if not mix or any(v < 0 for v in mix.values()) or sum(mix.values()) <= 0:
                raise ConfigError("mixes need non-negative weights with a positive sum")
        if set(self.country_mix) - set(COUNTRY_PREFIX):
            raise ConfigError(f"country_mix keys must be among {sorted(COUNTRY_PREFIX)}")
        if set(self.kind_mix) - {"text", "image", "video", "audio"}:
            raise ConfigError("kind_mix keys must be text, image, video, audio")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["prng"] = PRNG
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GenConfig":
        d = {k: v for k, v in d.items() if k != "prng"}
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**d)


@dataclass
class _Msg:
    gi: int
    sent: datetime
    sender: str
    kind: str
    text: str | None = None
    media_hash: str | None = None
    duration: int | None = None
    has_emoji: bool = False
    forwarded: bool = False
    reply_to: str | None = None
    id: str = ""
    planted: tuple | None = None  # (label, template_id, variant_id, mutated_positions)
    keyword: bool = False
    dup_of: str | None = None


@dataclass
class SynthOutput:
    config: GenConfig
    raw: dict[str, list[dict]]
    ground_truth: dict
    labeled: list[dict]
    planted_rows: list[dict]

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        out = Path(out_dir)
        (out / "raw").mkdir(parents=True, exist_ok=True)
        paths = {}
        for server, recs in sorted(self.raw.items()):
            p = out / "raw" / f"server_{server}.jsonl"
            with p.open("w", encoding="utf-8") as fh:
                for r in recs:
                    fh.write(json.dumps(r, ensure_ascii=False) + "\n")
            paths[f"raw_{server}"] = p
        for name, obj in (("ground_truth.json", self.ground_truth),
                          ("config.json", self.config.to_dict())):
            p = out / name
            p.write_text(json.dumps(obj, ensure_ascii=False, indent=1, sort_keys=True) + "\n",
                         encoding="utf-8")
            paths[name] = p
        p = out / "labeled_corpus.jsonl"
        with p.open("w", encoding="utf-8") as fh:
            for item in self.labeled:
                fh.write(json.dumps(item, ensure_ascii=False, sort_keys=True) + "\n")
        paths["labeled"] = p
        p = out / "planted_labels.csv"
        with p.open("w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, ["message_id", "label", "template_id", "variant_id"],
                               lineterminator="\n")
            w.writeheader()
            w.writerows(self.planted_rows)
        paths["planted"] = p
        return paths


class _Gen:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = np.random.Generator(np.random.PCG64(cfg.seed))
        self.t0 = parse_time(cfg.start).replace(second=0, microsecond=0)
        self.t_end = self.t0 + timedelta(days=cfg.days)
        self.identity_keys: set = set()
        self.hashes: list[tuple[str, str, int | None]] = []

    # small helpers over the single stream
    def choice(self, seq, p=None):
        return seq[int(self.rng.choice(len(seq), p=p))]

    def weights(self, mix: dict) -> tuple[list, np.ndarray]:
        keys = sorted(mix)
        w = np.array([mix[k] for k in keys], dtype=float)
        return keys, w / w.sum()

    def hexhash(self) -> str:
        return "".join(f"{int(x):02x}" for x in self.rng.integers(0, 256, size=16))

    def users(self) -> dict[str, list[str]]:
        keys, p = self.weights(self.cfg.country_mix)
        pool: dict[str, list[str]] = {k: [] for k in keys}
        seen = set()
        for _ in range(self.cfg.n_users):
            c = self.choice(keys, p)
            cc, lead, n = COUNTRY_PREFIX[c]
            while True:
                num = "+" + cc + lead + "".join(str(d) for d in self.rng.integers(0, 10, size=n))
                if num not in seen:
                    seen.add(num)
                    break
            pool[c].append(num)
        return pool

    def group_members(self, pool: dict[str, list[str]]) -> list[str]:
        cfg = self.cfg
        u = self.rng.random()
        a = cfg.size_exponent
        lo, hi = cfg.min_group_size, cfg.max_group_size
        if a == 1.0:
            size = lo * (hi / lo) ** u
        else:  # inverse CDF of a truncated power law
            size = (lo ** (1 - a) + u * (hi ** (1 - a) - lo ** (1 - a))) ** (1 / (1 - a))
        size = int(min(hi, max(lo, round(size))))
        keys = sorted(k for k in pool if pool[k])
        mix = self.rng.dirichlet([cfg.mix_concentration * cfg.country_mix[k] + 1e-3 for k in keys])
        members: list[str] = []
        taken = set()
        while len(members) < size:
            c = self.choice(keys, mix)
            cand = pool[c][int(self.rng.integers(len(pool[c])))]
            if cand not in taken:
                taken.add(cand)
                members.append(cand)
        return members

    def sentence(self, local_vocab: list[str], lo: int = 3, hi: int = 30) -> str:
        n = int(min(hi, max(lo, self.rng.geometric(1 / 10))))
        words = []
        for _ in range(n):
            src = local_vocab if self.rng.random() < 0.5 else COMMON_WORDS
            words.append(self.choice(src))
        return " ".join(words)

    def minute_in_day(self, day: int) -> datetime:
        w = np.array(HOUR_WEIGHTS, dtype=float)
        hour = int(self.rng.choice(24, p=w / w.sum()))
        minute = int(self.rng.integers(60))
        return self.t0 + timedelta(days=day, hours=hour, minutes=minute)

    def claim(self, m: _Msg) -> bool:
        key = (m.sender, m.sent, m.text, m.media_hash)
        if key in self.identity_keys:
            return False
        self.identity_keys.add(key)
        return True


def _templates(g: _Gen, n: int, base: list[str]) -> list[str]:
    out = list(base[:n])
    while len(out) < n:
        words = [g.choice(SCAM_WORDS) for _ in range(6)] + [g.choice(COMMON_WORDS) for _ in range(8)]
        out.append(" ".join(words))
    return out


def _mutate(g: _Gen, template: str, k: int) -> tuple[str, list[int]]:
    words = template.split()
    k = min(k, len(words))
    pos = sorted(int(i) for i in g.rng.choice(len(words), size=k, replace=False)) if k else []
    for i in pos:
        words[i] = g.choice(COMMON_WORDS)
    return " ".join(words), pos


def generate(cfg: GenConfig) -> SynthOutput:
    """Build raw capture logs plus ground truth for one configuration."""
    cfg.validate()
    g = _Gen(cfg)
    servers = ["A", "B"][:cfg.n_servers]
    if cfg.n_groups == 0:
        gt = _empty_truth(cfg)
        return SynthOutput(cfg, {s: [] for s in servers}, gt, [], [])

    pool = g.users()
    groups = []
    for gi in range(cfg.n_groups):
        members = g.group_members(pool)
        activity = g.rng.pareto(1.5, size=len(members)) + 0.1
        place = g.choice(PLACES)
        local_vocab = [place] + [g.choice(GOODS) for _ in range(6)] + [g.choice(PLACES) for _ in range(3)]
        title = f"Venezolanos en {place.capitalize()} {gi + 1}"
        icon = None
        if g.rng.random() >= cfg.no_icon_fraction:
            icon = f"{members[0][1:]}-{1580000000 + gi * 7919}"
        rate = float(cfg.daily_rate_mean * g.rng.lognormal(-cfg.daily_rate_sigma ** 2 / 2, cfg.daily_rate_sigma))
        groups.append({"members": members, "activity": activity / activity.sum(), "vocab": local_vocab,
                       "title": title, "icon": icon, "rate": rate, "msgs": []})

    kinds, kind_p = g.weights(cfg.kind_mix)

    def new_message(gi: int, sent: datetime) -> _Msg:
        grp = groups[gi]
        sender = grp["members"][int(g.rng.choice(len(grp["members"]), p=grp["activity"]))]
        kind = g.choice(kinds, kind_p)
        m = _Msg(gi, sent, sender, kind, has_emoji=bool(g.rng.random() < cfg.emoji_rate),
                 forwarded=bool(g.rng.random() < cfg.forwarded_rate))
        if kind == "text":
            m.text = g.sentence(grp["vocab"])
        else:
            if g.hashes and g.rng.random() < cfg.reshare_rate:
                same = [h for h in g.hashes if h[1] == kind]
                if same:
                    m.media_hash, _, m.duration = same[int(g.rng.integers(len(same)))]
            if m.media_hash is None:
                m.media_hash = g.hexhash()
                if kind in ("audio", "video"):
                    m.duration = int(g.rng.integers(3, 240 if kind == "video" else 120))
                g.hashes.append((m.media_hash, kind, m.duration))
            if kind in ("image", "video") and g.rng.random() < cfg.caption_rate:
                m.text = g.sentence(grp["vocab"], 2, 12)
        return m

    # background traffic
    for gi, grp in enumerate(groups):
        for day in range(cfg.days):
            for _ in range(int(g.rng.poisson(grp["rate"]))):
                m = new_message(gi, g.minute_in_day(day))
                if m.kind == "text":
                    rate = cfg.keyword_spike_rate if day == cfg.keyword_spike_day else cfg.keyword_rate
                    if g.rng.random() < rate:
                        words = m.text.split()
                        words.insert(int(g.rng.integers(len(words) + 1)), g.choice([cfg.keyword, cfg.keyword + "s"]))
                        m.text = " ".join(words)
                        m.keyword = True
                grp["msgs"].append(m)

    # planted misinformation; each template shows up early at least once
    span_min = cfg.days * 24 * 60
    templates = []
    for label, n, base, inst in (("scam", cfg.n_scam_templates, SCAM_TEMPLATES, cfg.scam_instances),
                                 ("fake_news", cfg.n_fake_templates, FAKE_TEMPLATES, cfg.fake_instances)):
        for ti, text in enumerate(_templates(g, n, base)):
            templates.append((label, f"{label}-{ti:02d}", text, inst))
    for label, tid, text, inst in templates:
        for vi in range(inst):
            gi = int(g.rng.integers(cfg.n_groups))
            frac = g.rng.random() * (0.4 if vi == 0 else 1.0)
            sent = g.t0 + timedelta(minutes=int(frac * span_min))
            grp = groups[gi]
            sender = grp["members"][int(g.rng.integers(len(grp["members"])))]
            variant, pos = _mutate(g, text, cfg.mutation)
            m = _Msg(gi, sent, sender, "text", text=variant, forwarded=bool(g.rng.random() < 0.6),
                     planted=(label, tid, vi, pos))
            grp["msgs"].append(m)

    # order, resolve identity collisions, add true duplicates, assign ids and replies
    true_dups = []
    for gi, grp in enumerate(groups):
        msgs = sorted(grp["msgs"], key=lambda m: m.sent)
        kept: list[_Msg] = []
        for m in msgs:
            while not g.claim(m):
                m.sent += timedelta(minutes=1)
            kept.append(m)
            if m.kind == "text" and m.planted is None and g.rng.random() < cfg.true_dup_rate:
                twin = _Msg(gi, m.sent, m.sender, "text", text=m.text, has_emoji=m.has_emoji,
                            forwarded=m.forwarded, keyword=m.keyword, dup_of="")
                kept.append(twin)
        kept.sort(key=lambda m: m.sent)
        for seq, m in enumerate(kept):
            m.id = f"g{gi:03d}-{seq:06d}"
        recent: list[_Msg] = []
        for m in kept:
            if m.dup_of is not None:
                # a twin shares its original's position; find it just before
                orig = next(x for x in reversed(recent) if x.text == m.text and x.sender == m.sender
                            and x.sent == m.sent)
                m.dup_of = orig.id
                true_dups.append((orig.id, m.id))
            elif recent and g.rng.random() < cfg.reply_prob:
                if g.rng.random() < cfg.missing_parent_rate:
                    m.reply_to = f"ghost-{m.id}"
                else:
                    window = recent[-cfg.reply_window:]
                    m.reply_to = window[int(g.rng.integers(len(window)))].id
            recent.append(m)
        grp["msgs"] = kept

    # rename events
    interval = timedelta(minutes=int(round(cfg.read_interval_hours * 60)))
    renames = {}
    rename_groups = sorted(int(i) for i in g.rng.choice(cfg.n_groups, size=cfg.n_rename_events, replace=False))
    for gi in rename_groups:
        frac = 0.3 + 0.4 * g.rng.random()
        at = g.t0 + timedelta(minutes=int(frac * span_min))
        renames[gi] = at

    def reading_times(si: int) -> list[datetime]:
        phase = timedelta(minutes=int(interval.total_seconds() // 60) * si // max(1, cfg.n_servers))
        times, t = [], g.t0 + phase + interval
        while t < g.t_end:
            times.append(t)
            t += interval
        times.append(max(last_sent + timedelta(minutes=1), times[-1] + timedelta(minutes=1) if times else g.t_end))
        return times

    last_sent = max([g.t_end - timedelta(minutes=1)] + [m.sent for grp in groups for m in grp["msgs"]])
    per_server_times = {s: reading_times(i) for i, s in enumerate(servers)}
    overlap = timedelta(minutes=int(cfg.rescroll_fraction * interval.total_seconds() // 60))

    uids = {}
    rename_info = []
    for gi, grp in enumerate(groups):
        old_uid = derive_uid(grp["icon"], grp["title"])
        uids[gi] = (old_uid, None)
        if gi not in renames:
            continue
        at = renames[gi]
        last_old = [max((t for t in ts if t < at), default=None) for ts in per_server_times.values()]
        last_old = [t for t in last_old if t is not None]
        if not last_old:
            del renames[gi]
            continue
        boundary = max(last_old)
        old_msgs = [m for m in grp["msgs"] if m.sent < boundary]
        if not old_msgs:
            del renames[gi]
            continue
        new_title = grp["title"] + " oficial"
        new_icon = None if grp["icon"] is None else grp["icon"].split("-")[0] + f"-{1590000000 + gi * 7919}"
        new_uid = derive_uid(new_icon, new_title)
        n_re = math.ceil(cfg.rename_overlap * len(old_msgs))
        cut = old_msgs[len(old_msgs) - n_re].sent if n_re else boundary
        uids[gi] = (old_uid, new_uid)
        grp["rename"] = (at, cut, new_title, new_icon)
        rename_info.append({"old_uid": old_uid, "new_uid": new_uid, "time": format_time(at),
                            "old_messages": len(old_msgs),
                            "rescrolled": sum(1 for m in old_msgs if m.sent >= cut)})

    # capture
    raw: dict[str, list[dict]] = {s: [] for s in servers}
    seen_pairs: dict[tuple[str, str], None] = {}
    for s in servers:
        times = per_server_times[s]
        for k, r in enumerate(times):
            for gi, grp in enumerate(groups):
                start = None if k == 0 else times[k - 1] - overlap
                uid, title, icon = uids[gi][0], grp["title"], grp["icon"]
                ren = grp.get("rename")
                if ren is not None and r >= ren[0]:
                    uid, title, icon = uids[gi][1], ren[2], ren[3]
                    first_after = k == 0 or times[k - 1] < ren[0]
                    if first_after and start is not None:
                        start = min(start, ren[1])
                for m in grp["msgs"]:
                    if m.sent >= r or (start is not None and m.sent < start):
                        continue
                    raw[s].append(_record(m, uid, title, icon, s, r))
                    seen_pairs[(m.id, uid)] = None

    labeled = [{"corpus_id": tid, "label": label, "text": text,
                "source": "factcheck" if label == "fake_news" else "manual"}
               for label, tid, text, _ in templates]
    all_msgs = [m for grp in groups for m in grp["msgs"]]
    planted_rows = [{"message_id": m.id, "label": m.planted[0], "template_id": m.planted[1],
                     "variant_id": m.planted[2]} for m in sorted(all_msgs, key=lambda m: m.id) if m.planted]
    gt = _truth(cfg, groups, uids, all_msgs, seen_pairs, true_dups, rename_info, raw)
    return SynthOutput(cfg, raw, gt, labeled, planted_rows)


def _record(m: _Msg, uid: str, title: str, icon: str | None, server: str, read: datetime) -> dict:
    rec = {
        "id": m.id, "group_uid": uid if icon else None, "group_title": title,
        "group_icon_uid": icon, "server": server, "read_time": format_time(read),
        "sent_time": format_time(m.sent, minute=True), "sender": m.sender, "kind": m.kind,
        "text": m.text, "media_hash": m.media_hash, "media_duration_s": m.duration,
        "has_emoji": m.has_emoji, "forwarded": m.forwarded, "reply_to": m.reply_to,
    }
    return {k: rec[k] for k in FIELDS}


def _empty_truth(cfg: GenConfig) -> dict:
    return {"prng": PRNG, "seed": cfg.seed, "messages": [], "dedup_expected": [],
            "true_duplicates": [], "read_copies_removed": 0, "renames": [], "cascades": [],
            "unresolved_replies": [], "planted": [], "keyword": {"stem": stem(cfg.keyword), "message_ids": []},
            "groups": {}}


def _truth(cfg, groups, uids, all_msgs, seen_pairs, true_dups, rename_info, raw) -> dict:
    by_id = {m.id: m for m in all_msgs}
    # cascades: walk each reply to its root, giving up on ghost parents
    root_of: dict[str, str | None] = {}

    def root(mid: str) -> str | None:
        chain = []
        cur = mid
        while cur not in root_of:
            chain.append(cur)
            m = by_id.get(cur)
            if m is None:
                res = None
                break
            if m.reply_to is None:
                res = cur
                break
            cur = m.reply_to
        else:
            res = root_of[cur]
        for c in chain:
            root_of[c] = res
        return res

    cascades: dict[str, list] = {}
    unresolved = []
    for m in sorted(all_msgs, key=lambda m: m.id):
        r = root(m.id)
        if r is None:
            unresolved.append(m.id)
        elif m.reply_to is not None:
            cascades.setdefault(r, []).append([m.id, m.reply_to])
    n_raw = sum(len(v) for v in raw.values())
    return {
        "prng": PRNG,
        "seed": cfg.seed,
        "groups": {uids[gi][0]: {"title": grp["title"], "icon_uid": grp["icon"],
                                 "members": len(grp["members"])} for gi, grp in enumerate(groups)},
        "messages": sorted([m.id, uids[m.gi][0]] for m in all_msgs),
        "dedup_expected": sorted([mid, uid] for mid, uid in seen_pairs),
        "true_duplicates": sorted([a, b] for a, b in true_dups),
        "read_copies_removed": n_raw - len(seen_pairs),
        "renames": rename_info,
        "cascades": [{"root": r, "edges": sorted(e)} for r, e in sorted(cascades.items())],
        "unresolved_replies": unresolved,
        "planted": [{"message_id": m.id, "label": m.planted[0], "template_id": m.planted[1],
                     "variant_id": m.planted[2], "mutated_positions": m.planted[3]}
                    for m in sorted(all_msgs, key=lambda m: m.id) if m.planted],
        "keyword": {"stem": stem(cfg.keyword),
                    "message_ids": sorted(m.id for m in all_msgs if m.keyword)},
    }
