"""Triangulated subcategories of modules over a principal ideal domain.

Canonical forms via the Smith normal form, Euler data, a classifier for the
subcategory generated by a set of modules, certificates built from explicit
short exact sequences, and a brute-force oracle over finite abelian groups.
"""

from .euler import ChiVector, chi
from .homcheck import ModuleHom, ShortExactSeq, is_exact, kernel_image_cokernel
from .modstruct import FgModule, Presentation, from_presentation, smith_normal_form
from .ring import ZZ, FieldRing, IntegerRing, PolyRing, parse_ring
from .subcat import closure_class, from_spec_subset, generate, member, to_spec_subset
from .witness import Certificate, NotInSubcategory, member_certificate, verify_certificate

__version__ = "0.1.0"
