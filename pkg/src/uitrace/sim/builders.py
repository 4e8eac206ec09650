"""Stock app models for the simulator scenarios.

Every builder is deterministic in its seed.  Screens are generated from one
template family so that distinct screens never pass the similarity check while
their cosmetic variants (nested tip leaves appended under the root) always do.
"""

from __future__ import annotations

import random

from ..issues import DEFAULT_AD_ACTIVITY, AppProfile
from ..trace import ElementPath, UiNode
from .model import SCREEN_H, SCREEN_W, AppModel, ScreenTemplate, Transition, Trap

TOOLBAR, CONTENT = 0, 1
MAX_BUTTONS = 12
T_MIN_MS = 10 * 60 * 1000
LARGE_APP = 600
TRAP_DWELL_MS = 15 * 60 * 1000
# fraction of ordinary screens carrying a link into an injected subspace
ENTRY_SHARE = 0.04

LOGIN_ACTIVITIES = ("LoginActivity", "SignUpActivity", "TermsActivity")

UNIFORM_VARIANTS = (1.0, 1.0)
RARE_VARIANTS = (0.6, 0.25, 0.1, 0.05)


def _tips() -> tuple[UiNode, ...]:
    return tuple(
        UiNode("TipView", f"tip{k}", True, (40, 1720 + 60 * k, 1040, 1770 + 60 * k), f"Tip #{k}")
        for k in range(3)
    )


def screen_template(sid: str, activity: str, buttons: list[str], variants=None) -> ScreenTemplate:
    """Generic screen: toolbar, a column of buttons, and decoration.

    Button ``k`` lives at path [(LinearLayout, <sid>:content, 1), (Button, <sid>:b<k>, k)].
    The hidden panel and the off-screen banner exist only in the concrete tree.
    ``variants`` holds the weights for showing 0..m tip leaves (m <= 3).
    """
    if len(buttons) > MAX_BUTTONS:
        raise ValueError(f"{sid}: at most {MAX_BUTTONS} buttons")
    toolbar = UiNode(
        "LinearLayout", f"{sid}:toolbar", True, (0, 0, SCREEN_W, 160), None,
        (
            UiNode("ImageButton", "nav_up", True, (0, 0, 160, 160)),
            UiNode("TextView", f"{sid}:title", True, (180, 20, 900, 140), sid),
        ),
    )
    rows = tuple(
        UiNode("Button", f"{sid}:b{k}", True, (40, 200 + 120 * k, 1040, 300 + 120 * k), label)
        for k, label in enumerate(buttons)
    )
    content = UiNode("LinearLayout", f"{sid}:content", True, (0, 160, SCREEN_W, 1700), None, rows)
    hidden = UiNode(
        "FrameLayout", f"{sid}:drawer", False, (0, 0, 800, SCREEN_H), None,
        tuple(UiNode("CheckedTextView", f"{sid}:menu{k}", True, (0, 100 * k, 800, 100 * k + 90)) for k in range(3)),
    )
    offscreen = UiNode("ImageView", f"{sid}:below_fold", True, (0, 2000, SCREEN_W, 2400))
    root = UiNode("FrameLayout", None, True, (0, 0, SCREEN_W, SCREEN_H), None, (toolbar, content, hidden, offscreen))
    if variants is None:
        return ScreenTemplate(activity, root)
    return ScreenTemplate(activity, root, _tips()[: len(variants) - 1], tuple(variants))


def button_path(sid: str, k: int) -> ElementPath:
    return ElementPath((("LinearLayout", f"{sid}:content", CONTENT), ("Button", f"{sid}:b{k}", k)))


class _Builder:
    def __init__(self, app: str, seed: int):
        self.app = app
        self.rng = random.Random(seed)
        self.buttons: dict[str, list[tuple[str, Transition]]] = {}
        self.activity: dict[str, str] = {}
        self.variants: dict[str, tuple | None] = {}
        self.back: dict[str, str] = {}

    def screen(self, sid: str, activity: str, variants=None, parent: str | None = None):
        self.activity[sid] = activity
        self.variants[sid] = variants
        self.buttons.setdefault(sid, [])
        if parent is not None:
            self.back[sid] = parent

    def link(self, src: str, dst: str, label: str | None = None, **kw):
        self.buttons[src].append((label or f"to {dst}", Transition(dst, **kw)))

    def tree(self, root: str, prefix: str, n: int, branching: int, variants_for, activities: int = 6):
        """Breadth-first tree of ``n`` screens hanging under ``root``."""
        made = []
        queue = [root]
        count = 0
        while count < n:
            parent = queue.pop(0)
            for _ in range(branching):
                if count >= n:
                    break
                sid = f"{prefix}{count}"
                act = f"{prefix.capitalize()}Activity{count % activities}"
                self.screen(sid, act, variants_for(count), parent)
                self.link(parent, sid)
                queue.append(sid)
                made.append(sid)
                count += 1
        return made

    def build(self, start: str, traps=(), back_weight: float = 0.1) -> AppModel:
        screens = {}
        edges = {}
        for sid, items in self.buttons.items():
            screens[sid] = screen_template(sid, self.activity[sid], [label for label, _ in items], self.variants[sid])
            for k, (_, tr) in enumerate(items):
                edges[(sid, button_path(sid, k))] = tr
        model = AppModel(self.app, start, screens, edges, dict(self.back), list(traps), back_weight)
        model.validate()
        return model


def _variant_picker(rng: random.Random, weights, share: float = 0.5):
    flags = {}

    def pick(k: int):
        if k not in flags:
            flags[k] = rng.random() < share
        return weights if flags[k] else None

    return pick


def _cross_links(b: _Builder, made: list[str], pool: list[str], k: int):
    for sid in made:
        for dst in b.rng.sample(pool, k):
            if dst != sid and len(b.buttons[sid]) < MAX_BUTTONS:
                b.link(sid, dst)


def benign_model(seed: int = 0, n_screens: int = 30) -> AppModel:
    """Small strongly connected app: a shallow tree plus random cross links."""
    b = _Builder("benign-app", seed)
    b.screen("main", "MainActivity")
    made = b.tree("main", "s", n_screens - 1, 4, _variant_picker(b.rng, UNIFORM_VARIANTS, 0.25))
    # three links each keeps visit frequencies flat enough that the last
    # ten minutes see nearly every screen
    _cross_links(b, made, ["main"] + made, 3)
    return b.build("main")


def _large_app(b: _Builder, n_screens: int) -> list[str]:
    """Big enough that a one-hour walk keeps finding new screens."""
    b.screen("main", "MainActivity", RARE_VARIANTS)
    made = b.tree("main", "p", n_screens, 3, _variant_picker(b.rng, RARE_VARIANTS))
    _cross_links(b, made, ["main"] + made, 2)
    return made


def _entry_links(b: _Builder, made: list[str], dst: str, label: str, share: float, **kw):
    """Link ``dst`` from main and from a random ``share`` of the other screens."""
    b.link("main", dst, label, **kw)
    for sid in made:
        if b.rng.random() < share and len(b.buttons[sid]) < MAX_BUTTONS:
            b.link(sid, dst, label, **kw)


def _add_logout(b: _Builder, made: list[str], share: float):
    b.screen("settings", "SettingsActivity", None, "main")
    b.screen("account", "AccountActivity", None, "settings")
    b.screen("confirm_signout", "AccountActivity", None, "account")
    _entry_links(b, made, "settings", "Settings", share)
    b.link("settings", "account", "Account")
    b.link("settings", "main", "Done")
    b.link("account", "confirm_signout", "Sign out")
    b.link("account", "settings", "Back to settings")
    b.link("confirm_signout", "login", "OK", tag="logout", sets_start="login")
    b.link("confirm_signout", "account", "CANCEL")
    b.screen("login", "LoginActivity", None, "login")
    b.screen("signup", "SignUpActivity", None, "login")
    b.screen("terms", "TermsActivity", None, "login")
    b.link("login", "login", "Sign in")
    b.link("login", "signup", "Create account")
    b.link("login", "terms", "Terms")
    b.link("signup", "signup", "Submit")
    b.link("signup", "terms", "Terms")
    b.link("terms", "login", "Accept")


def _add_trap(b: _Builder, made: list[str], share: float, max_entries: int, min_dwell_ms: int) -> Trap:
    b.screen("run_home", "RunHomeActivity", None, "main")
    _entry_links(b, made, "run_home", "Run", share)
    b.link("run_home", "main", "Close")
    b.link("run_home", "run_active", "START", tag="trap_entry")
    b.screen("run_active", "RunActivity", None, "run_discard")
    b.screen("run_discard", "RunActivity", None, "run_active")
    for label in ("Pause", "Lap", "Music", "Map"):
        b.link("run_active", "run_active", label)
    b.link("run_active", "run_discard", "Stop")
    b.link("run_discard", "run_active", "outside")
    b.link("run_discard", "run_home", "OK")
    return Trap("run", frozenset({"run_active", "run_discard"}), min_dwell_ms, 0.01, max_entries, "edge", "tarpit")


def _add_ad(b: _Builder, made: list[str], share: float, min_dwell_ms: int) -> Trap:
    b.screen("ad", DEFAULT_AD_ACTIVITY, None, "ad")
    for label in ("Install", "Close ad", "Learn more"):
        b.link("ad", "ad", label)
    _entry_links(b, made, "ad", "Sponsored", share, tag="ad")
    return Trap("ad", frozenset({"ad"}), min_dwell_ms, 0.01, 1, "restart", "ad_freeze")


def logout_model(seed: int = 0, n_screens: int = LARGE_APP, share: float = ENTRY_SHARE) -> AppModel:
    b = _Builder("notes-app", seed)
    made = _large_app(b, n_screens)
    _add_logout(b, made, share)
    return b.build("main")


def tarpit_model(
    seed: int = 0, n_screens: int = LARGE_APP, entries: int = 1, min_dwell_ms: int = TRAP_DWELL_MS,
    share: float = ENTRY_SHARE,
) -> AppModel:
    b = _Builder("run-app", seed)
    made = _large_app(b, n_screens)
    trap = _add_trap(b, made, share, entries, min_dwell_ms)
    return b.build("main", [trap])


def ad_freeze_model(
    seed: int = 0, n_screens: int = LARGE_APP, min_dwell_ms: int = TRAP_DWELL_MS, share: float = ENTRY_SHARE
) -> AppModel:
    b = _Builder("dictionary-app", seed)
    made = _large_app(b, n_screens)
    trap = _add_ad(b, made, share, min_dwell_ms)
    return b.build("main", [trap])


def mixed_model(
    seed: int = 0, n_screens: int = LARGE_APP, min_dwell_ms: int = TRAP_DWELL_MS, share: float = ENTRY_SHARE
) -> AppModel:
    b = _Builder("mixed-app", seed)
    made = _large_app(b, n_screens)
    traps = [_add_trap(b, made, share, 1, min_dwell_ms), _add_ad(b, made, share, min_dwell_ms)]
    return b.build("main", traps)


def model_for(scenario: str, seed: int = 0) -> AppModel:
    if scenario == "benign":
        return benign_model(seed)
    if scenario == "logout":
        return logout_model(seed)
    if scenario == "tarpit":
        return tarpit_model(seed, entries=1)
    if scenario == "tarpit_x2":
        return tarpit_model(seed, entries=2)
    if scenario == "ad_freeze":
        return ad_freeze_model(seed)
    if scenario == "mixed":
        return mixed_model(seed)
    raise ValueError(f"unknown scenario {scenario!r}")


def profile_for(model: AppModel):
    """App profile matching the stock models' login and ad activities."""
    logins = {t.activity for t in model.screens.values()} & set(LOGIN_ACTIVITIES)
    return AppProfile(model.app, frozenset(logins), DEFAULT_AD_ACTIVITY)
