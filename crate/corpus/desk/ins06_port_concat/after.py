def endpoint(host, port):
    addr = host + ':' + str(port)
    return addr
