def endpoint(host, port):
    addr = host + ':' + port
    return addr
