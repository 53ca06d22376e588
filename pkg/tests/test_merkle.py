import hashlib

from medchain.chain.merkle import merkle_root

H1 = hashlib.sha256(b"tx1").hexdigest()
H2 = hashlib.sha256(b"tx2").hexdigest()
H3 = hashlib.sha256(b"tx3").hexdigest()


def _pair(a: str, b: str) -> str:
    return hashlib.sha256(bytes.fromhex(a) + bytes.fromhex(b)).hexdigest()


def test_empty_is_hash_of_empty_string():
    assert merkle_root([]) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    assert merkle_root([]) == hashlib.sha256(b"").hexdigest()


def test_single_leaf_is_duplicated():
    assert merkle_root([H1]) == _pair(H1, H1)


def test_two_leaves():
    assert merkle_root([H1, H2]) == _pair(H1, H2)


def test_three_leaves_duplicate_last():
    # Hand reduction: level0 = [h1,h2,h3,h3]; level1 = [p(h1,h2), p(h3,h3)].
    expected = _pair(_pair(H1, H2), _pair(H3, H3))
    assert merkle_root([H1, H2, H3]) == expected
    assert merkle_root([H1, H2, H3]) == merkle_root([H1, H2, H3, H3])


def test_order_sensitivity():
    assert merkle_root([H1, H2]) != merkle_root([H2, H1])
