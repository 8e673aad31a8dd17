from django import forms

from core.exceptions import InvalidConfigurationError

from .solver import FixedCurve, FixedPointConfig

CURVE_KEYS = {"g", "r", "c2"}


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


class FixedPointConfigForm(forms.Form):
    """
    Config JSON: {"N": int, "s": int, "points": [[i, j, multiplicity]],
    "curves": [{"g": int, "r": int, "c2": int}]}.
    """

    N = forms.IntegerField(min_value=1)
    s = forms.IntegerField()
    points = forms.JSONField(required=False)
    curves = forms.JSONField(required=False)

    def clean_points(self):
        points = self.cleaned_data.get("points") or []
        if not isinstance(points, list):
            raise forms.ValidationError("points must be a list of [i, j, multiplicity].")
        for entry in points:
            if not isinstance(entry, list) or len(entry) != 3 or not all(map(_is_int, entry)):
                raise forms.ValidationError(
                    f"point entry {entry!r} must be [i, j, multiplicity] with integers."
                )
        return [tuple(entry) for entry in points]

    def clean_curves(self):
        curves = self.cleaned_data.get("curves") or []
        if not isinstance(curves, list):
            raise forms.ValidationError("curves must be a list of records.")
        cleaned = []
        for curve in curves:
            if not isinstance(curve, dict) or set(curve) != CURVE_KEYS:
                raise forms.ValidationError(f"curve {curve!r} must have exactly the keys g, r, c2.")
            if not all(map(_is_int, curve.values())):
                raise forms.ValidationError(f"curve {curve!r} must have integer fields.")
            cleaned.append(FixedCurve(**curve))
        return cleaned

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        try:
            cleaned_data["config"] = FixedPointConfig(
                N=cleaned_data["N"],
                s=cleaned_data["s"],
                points=tuple(cleaned_data["points"]),
                curves=tuple(cleaned_data["curves"]),
            )
        except InvalidConfigurationError as exc:
            raise forms.ValidationError(str(exc))
        return cleaned_data
