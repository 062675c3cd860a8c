def load_body(response):
    body = response.read().decode('utf-8')
    return json.loads(body)
