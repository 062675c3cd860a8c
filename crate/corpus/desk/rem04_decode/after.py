def write_out(path, payload):
    save(path, payload)
