def frame(payload):
    header = b'HDR'
    return header + payload
