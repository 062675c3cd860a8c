def frame(payload):
    header = 'HDR'
    return header + payload
