from proxy import proxy_authorization


def test_credentials_are_encoded():
    assert proxy_authorization('user', 'pa%20ss') == b'dXNlcjpwYSBzcw=='
    assert proxy_authorization('', 'x') is None


if __name__ == '__main__':
    test_credentials_are_encoded()
