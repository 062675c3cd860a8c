def sign(key, msg):
    if key:
        blob = force_bytes('%s.%s' % (normalize(key), normalize(msg)))
        digest = hmac_sha1(blob).hexdigest()
    return digest
