"""System checks for the search limits in settings."""

from django.conf import settings
from django.core.checks import Error, register

LIMITS = (
    ("K3EQ_SEARCH_BUDGET", "k3eq.E001", 1),
    ("DISCRIMINANT_ORDER_LIMIT", "k3eq.E002", 1),
    ("LEFSCHETZ_MAX_POINTS", "k3eq.E003", 0),
)


@register()
def check_search_limits(app_configs, **kwargs):
    errors = []
    for name, check_id, minimum in LIMITS:
        value = getattr(settings, name, None)
        if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
            errors.append(
                Error(
                    f"{name} must be an integer >= {minimum}, got {value!r}.",
                    hint=f"Set {name} in the environment or the settings module.",
                    id=check_id,
                )
            )
    return errors
