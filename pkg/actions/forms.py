from django import forms
from sympy import ImmutableMatrix

from core.exceptions import DegenerateLatticeError, InvalidConfigurationError
from lattices.forms import integer_rows, square_rows
from lattices.lattice import IntegerLattice

from .k3action import MUKAI_RANK, K3Action, PicardData, TraceSequence


class ActionForm(forms.Form):
    """
    Action JSON: {"N": int, "s": int, "mukai_matrix": [[int;24];24],
    "pic": optional {"gram": [[int]], "matrix": [[int]]}}.
    """

    N = forms.IntegerField(min_value=1)
    s = forms.IntegerField()
    mukai_matrix = forms.JSONField()
    pic = forms.JSONField(required=False)
    label = forms.CharField(required=False, max_length=200)

    def clean_mukai_matrix(self):
        rows = square_rows(self.cleaned_data.get("mukai_matrix"), "mukai_matrix")
        if len(rows) != MUKAI_RANK:
            raise forms.ValidationError(
                f"mukai_matrix must be {MUKAI_RANK}x{MUKAI_RANK}, got {len(rows)}x{len(rows)}."
            )
        return ImmutableMatrix(rows)

    def clean_pic(self):
        pic = self.cleaned_data.get("pic")
        if pic is None:
            return None
        if not isinstance(pic, dict) or set(pic) != {"gram", "matrix"}:
            raise forms.ValidationError("pic must have exactly the keys gram and matrix.")
        gram = square_rows(pic["gram"], "pic.gram")
        matrix = integer_rows(pic["matrix"], "pic.matrix")
        if len(matrix) != len(gram) or any(len(row) != len(gram) for row in matrix):
            raise forms.ValidationError("pic.matrix must have the size of pic.gram.")
        try:
            lattice = IntegerLattice.from_rows(gram, "Pic")
        except (DegenerateLatticeError, ValueError) as exc:
            raise forms.ValidationError(f"pic.gram: {exc}")
        return PicardData(lattice, ImmutableMatrix(matrix))

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        cleaned_data["action"] = K3Action(
            N=cleaned_data["N"],
            mukai_matrix=cleaned_data["mukai_matrix"],
            s=cleaned_data["s"],
            pic=cleaned_data["pic"],
            label=(cleaned_data.get("label") or "").strip(),
        )
        return cleaned_data


class TraceSequenceForm(forms.Form):
    """{"N": int, "values": {"r": chi(sigma^r)}} over divisors r of N."""

    N = forms.IntegerField(min_value=1)
    values = forms.JSONField()

    def clean_values(self):
        values = self.cleaned_data.get("values")
        if not isinstance(values, dict):
            raise forms.ValidationError("values must map divisors to traces.")
        cleaned = {}
        for key, value in values.items():
            try:
                r = int(key)
            except (TypeError, ValueError):
                raise forms.ValidationError(f"{key!r} is not an integer exponent.")
            if isinstance(value, bool) or not isinstance(value, int):
                raise forms.ValidationError(f"trace of sigma^{key} must be an integer.")
            cleaned[r] = value
        return cleaned

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        try:
            cleaned_data["traces"] = TraceSequence(cleaned_data["N"], cleaned_data["values"])
        except InvalidConfigurationError as exc:
            raise forms.ValidationError(str(exc))
        return cleaned_data
