def write_out(path, payload):
    payload = payload.decode('ascii')
    save(path, payload)
