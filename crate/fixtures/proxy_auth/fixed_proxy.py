import base64
from urllib.parse import unquote

from helpers import to_bytes


def proxy_authorization(user, password):
    if user:
        user_pass = to_bytes('%s:%s' % (unquote(user), unquote(password)))
        creds = base64.b64encode(user_pass).strip()
    else:
        creds = None
    return creds
