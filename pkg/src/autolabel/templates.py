"""
Question strings and answer templates for the planning-oriented QAs.

Variant 0 of every description clause is the canonical training text; the
other variants are paraphrases used only as held-out caption references.
"""
from typing import Optional, Tuple

from src.core.exceptions import SchemaError
from src.domain.vocabulary import (
    Lateral,
    Longitudinal,
    MetaAction,
    NavCommand,
    QAType,
    TrafficLightState,
)

QUESTIONS = {
    QAType.DESCRIPTION: "Describe the driving scene around the ego vehicle.",
    QAType.TRAFFIC_LIGHT: "What is the state of the traffic light ahead?",
    QAType.VRU: "Where are the vulnerable road users around the ego vehicle?",
    QAType.MOTION: "What will the nearby vehicles do next?",
    QAType.PLAN: "What should the ego vehicle do next? Answer with a lateral and a longitudinal meta-action.",
    QAType.EXPLANATION: "Why should the ego vehicle take this action?",
}

NONE_ANSWER = "none"

DENSITY_WORDS = ("empty", "light", "busy")

_DENSITY = {
    0: ("The road is empty.", "There is no other traffic on the road.", "No other road users share the road."),
    1: ("Traffic is light.", "There are a few other road users.", "The road carries light traffic."),
    2: ("Traffic is busy.", "There are many other road users.", "The road carries busy traffic."),
}
_NO_LIGHT = ("There is no traffic light.", "No traffic light is visible ahead.", "The ego lane has no traffic signal.")
_LIGHT = ("The traffic light ahead is {c}.", "A {c} traffic light is ahead.", "The signal ahead shows {c}.")
_NO_VRU = (
    "No vulnerable road users are nearby.",
    "There are no pedestrians or cyclists nearby.",
    "Nobody is walking or cycling nearby.",
)
_ONE_VRU = (
    "There is 1 vulnerable road user nearby.",
    "1 pedestrian or cyclist is nearby.",
    "The scene contains 1 vulnerable road user.",
)
_MANY_VRU = (
    "There are {n} vulnerable road users nearby.",
    "{n} pedestrians or cyclists are nearby.",
    "The scene contains {n} vulnerable road users.",
)
_ROAD = (
    "The scene is a paved urban road.",
    "The ego vehicle drives on a paved urban road.",
    "This is a paved road in an urban area.",
)
N_DESCRIPTION_VARIANTS = len(_ROAD)


def density_bucket(agent_count: int) -> int:
    """0 agents -> empty, 1-3 -> light, 4+ -> busy."""
    if agent_count <= 0:
        return 0
    if agent_count <= 3:
        return 1
    return 2


def render_description(density: int, light: TrafficLightState, vru_count: int, variant: int = 0) -> str:
    light_clause = _NO_LIGHT[variant] if light is TrafficLightState.NONE else _LIGHT[variant].format(c=light.value)
    if vru_count <= 0:
        vru_clause = _NO_VRU[variant]
    elif vru_count == 1:
        vru_clause = _ONE_VRU[variant]
    else:
        vru_clause = _MANY_VRU[variant].format(n=vru_count)
    return " ".join([_DENSITY[density][variant], light_clause, vru_clause, _ROAD[variant]])


def parse_description(answer: str) -> Tuple[int, TrafficLightState]:
    """Recover (density bucket, traffic light) from a canonical description."""
    sentences = [s.strip() for s in answer.split(".") if s.strip()]
    if len(sentences) < 2:
        raise SchemaError(f"not a scene description: {answer!r}", field="answer")
    first = sentences[0].lower()
    density = next((i for i, w in enumerate(DENSITY_WORDS) if w in first.split()), None)
    if density is None:
        raise SchemaError(f"no density clause in {answer!r}", field="answer")
    second = sentences[1].lower()
    light = TrafficLightState.NONE
    if "no traffic light" not in second:
        light = next((s for s in TrafficLightState if s.value in second.split()), TrafficLightState.NONE)
    return density, light


def render_action(action: MetaAction) -> str:
    return str(action)


def render_vru_entry(agent_class: str, x: float, y: float) -> str:
    along = "ahead" if x >= 0 else "behind"
    side = "left" if y >= 0 else "right"
    return f"{agent_class} {int(abs(x))} m {along} and {int(abs(y))} m {side}"


def count_listed(answer: str) -> int:
    """Number of entries in a '; '-joined list answer ('none' is zero)."""
    if answer.strip() == NONE_ANSWER:
        return 0
    return len([p for p in answer.split(";") if p.strip()])


def first_motion_action(answer: str) -> Optional[MetaAction]:
    """Action of the first (nearest) vehicle in a motion answer."""
    if answer.strip() == NONE_ANSWER:
        return None
    first = answer.split(";")[0]
    _, _, action_text = first.partition(":")
    return MetaAction.parse(action_text)


_LATERAL_PHRASE = {Lateral.LEFT: "turn left", Lateral.STRAIGHT: "go straight", Lateral.RIGHT: "turn right"}
_LONGITUDINAL_PHRASE = {
    Longitudinal.ACCELERATE: "accelerate",
    Longitudinal.KEEP: "keep its speed",
    Longitudinal.DECELERATE: "slow down",
    Longitudinal.STOP: "stop",
}
_NAV_PHRASE = {NavCommand.LEFT: "turn left", NavCommand.STRAIGHT: "go straight", NavCommand.RIGHT: "turn right"}


def render_explanation(
    action: MetaAction,
    light: TrafficLightState,
    nav: NavCommand,
    obstacle_ahead: Optional[str],
) -> str:
    """
    Explanation keyed on (longitudinal, traffic light, nearest obstacle ahead).

    ``obstacle_ahead`` is the class word of the nearest in-lane agent within
    reach, or None when the lane ahead is clear.
    """
    lon = action.longitudinal
    vru_ahead = obstacle_ahead in ("pedestrian", "cyclist")
    if lon is Longitudinal.STOP:
        if light is TrafficLightState.RED:
            return "The ego vehicle is stopping because the traffic light ahead is red."
        if vru_ahead:
            return f"The ego vehicle is stopping to yield to the {obstacle_ahead} ahead."
        if obstacle_ahead:
            return "The ego vehicle is stopping because a vehicle is stopped ahead."
    elif lon is Longitudinal.DECELERATE:
        if vru_ahead:
            return f"The ego vehicle is decelerating to yield to the {obstacle_ahead} ahead."
        if light in (TrafficLightState.RED, TrafficLightState.YELLOW):
            return f"The ego vehicle is decelerating because the traffic light ahead is {light.value}."
        if obstacle_ahead:
            return "The ego vehicle is decelerating to keep a safe distance from the vehicle ahead."
    elif lon is Longitudinal.ACCELERATE:
        if light is TrafficLightState.GREEN and not obstacle_ahead:
            return "The ego vehicle is accelerating because the traffic light ahead is green and the lane is clear."
    return (
        f"The ego vehicle will {_LATERAL_PHRASE[action.lateral]} and {_LONGITUDINAL_PHRASE[lon]}, "
        f"following the navigation command to {_NAV_PHRASE[nav]}."
    )
