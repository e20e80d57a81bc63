import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apacket.certio import CertificateFormatError, from_json, from_text, to_json, to_text
from apacket.reduce import run_reduction, verify_certificate
from apacket.sampling import random_target


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=80, deadline=None)
def test_round_trip_text_and_json(seed):
    cert = run_reduction(random_target(random.Random(seed), allow_zero=True))
    for enc, dec in ((to_text, from_text), (to_json, from_json)):
        data = enc(cert)
        back = dec(data)
        assert back.tree == cert.tree
        assert enc(back) == data
        assert verify_certificate(back)


def test_text_is_deterministic_and_line_oriented():
    t = random_target(random.Random(5))
    a, b = to_text(run_reduction(t)), to_text(run_reduction(t))
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "apacket-certificate 1"
    steps = [ln for ln in lines if ln.startswith("step ")]
    assert len(steps) == len(run_reduction(t).steps)
    assert all(" before=" in ln and " after=" in ln for ln in steps)


def test_json_has_version():
    data = json.loads(to_json(run_reduction(random_target(random.Random(1)))))
    assert data["format"] == "apacket-certificate" and data["version"] == 1


def test_corrupted_inputs_are_rejected():
    text = to_text(run_reduction(random_target(random.Random(2))))
    with pytest.raises(CertificateFormatError):
        from_text(text.replace("apacket-certificate 1", "apacket-certificate 9"))
    with pytest.raises(CertificateFormatError):
        from_text(text.replace(" before=", " before=0", 1))
    data = json.loads(to_json(run_reduction(random_target(random.Random(2)))))
    data["version"] = 2
    with pytest.raises(CertificateFormatError):
        from_json(json.dumps(data))


def test_edited_expectation_fails_verification():
    cert = run_reduction(random_target(random.Random(3)))
    text = to_text(cert)
    edited = text.replace("L=order:gain:0:", "L=order:gain:1:", 1)
    if edited != text:
        assert not verify_certificate(from_text(edited))
